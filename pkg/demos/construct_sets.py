"""Build B1[4](q) sets for a few moduli and show how each one was reduced."""

from b1sets import dispatch, max_bset_exact

for q in (48, 120, 240, 60, 54):
    bset, report = dispatch(q)
    trace = " <- ".join(f"{s.theorem}({s.q})" for s in report.steps)
    print(f"q={q:4d} size={len(bset):3d} {report.exactness:11s} {trace}")
    if not report.exact:
        best = max_bset_exact(q)
        print(f"       search finds {best.max_size}: {best.witness.elements}")
