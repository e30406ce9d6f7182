# coding: utf-8

# # Counting emitters
#
# A lossless chain of N emitters has N-1 transparency points, a lossy chain
# shows N reflection peaks. Weak sidelobes are dropped with a prominence
# threshold relative to the tallest peak.

from wgqed import EmitterArray, analyze, count_emitters

for n in (2, 3, 4):
    _, lossless = analyze(EmitterArray.chain(n, 0.05, 1.0))
    _, lossy = analyze(EmitterArray.chain(n, 0.05, 5.0, 1.0))
    print(
        f"N = {n}:  lossless dips {len(lossless.significant().dips)} -> {count_emitters(lossless, 'lossless')}"
        f"   lossy peaks {len(lossy.significant().peaks)} -> {count_emitters(lossy, 'lossy')}"
    )

# Without the threshold the raw extrema include the far sidelobes:

_, f = analyze(EmitterArray.chain(3, 0.05, 5.0, 1.0))
print("raw peaks:", [round(p.height, 5) for p in f.peaks])
