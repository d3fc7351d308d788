"""Compare nonzero correlation-function signatures across state families."""

from clustercorr import catalog
from clustercorr.cluster import correlation_tensor
from clustercorr.measures import three_tangle

for name, state in [
    ("GHZ3", catalog.ghz(3, 1)),
    ("W3", catalog.w_state(3)),
    ("zeta1", catalog.zeta(1)),
    ("chi4", catalog.list_family("chi4")[0]),
    ("varphi5", catalog.varphi5(10)),
    ("Brown", catalog.BROWN5),
]:
    sig = correlation_tensor(state)
    items = ", ".join(f"{k}:{v:+.3f}" for k, v in sorted(sig.entries.items())[:8])
    more = "" if len(sig) <= 8 else f" ... ({len(sig)} keys)"
    print(f"{name:8s} {items}{more}")

print(f"\n3-tangle GHZ3={three_tangle(catalog.ghz(3, 1)).tau:.6f} W3={three_tangle(catalog.w_state(3)).tau:.6f}")
