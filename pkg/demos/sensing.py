# coding: utf-8

# # Reading a separation change off a peak shift
#
# At d = 0.01 lambda the near-field coupling is huge, so a tiny change of d
# moves both collective lines. The superradiant one moves a lot but is broad,
# the subradiant one moves little but is very narrow.

from wgqed import SensingConfig, branch_center, min_detectable, read_shift
from wgqed.sensing import asymptotic_dd

sup = SensingConfig(d=0.01, gamma_wg=10.0, gamma_free=1.0)
sub = SensingConfig(d=0.01, gamma_wg=10.0, gamma_free=1.0, branch="subradiant")

shift = branch_center(0.01 - 1e-4, sup) - branch_center(0.01, sup)
print(f"superradiant shift for dd = -1e-4: {shift:.2f} gamma")
shift = branch_center(0.01 + 1e-7, sub) - branch_center(0.01, sub)
print(f"subradiant shift for dd = +1e-7: {shift:.4f} gamma")

# Converting a measured shift back: the root-found value is authoritative,
# the small-d formula is within a few percent here.

reading = read_shift(92.0, sup)
print(f"92 gamma -> dd = {reading.dd:.4e} (asymptotic {asymptotic_dd(92.0, sup):.4e})")
print(f"          = {reading.strain:.1f} microstrain or {reading.temperature:.2f} K")
print(reading.note)

for cfg in (sup, sub):
    dd, w = min_detectable(cfg)
    print(f"{cfg.branch:>12}: smallest resolvable shift {w:.3g} gamma -> dd {dd:.2e} lambda")
