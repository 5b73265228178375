"""Does condition (c) imply the segment inequality (a)? That direction is
open. This campaign searches parametrized families for a member where
falsification finds no (c) violation but does find an (a) violation.

Any candidate that survives the 10x re-verification of (c) is printed as
a research lead, never as a proof; an empty result is the expected
outcome and is itself weak evidence for the implication.

Run: python3 demos/open_question.py
"""

from quasicheck.conditions import CheckConfig
from quasicheck.families import shipped_families
from quasicheck.search import SearchBudget, open_question_search

budget = SearchBudget(max_evals=30_000)

for fam in shipped_families():
    print(f"family {fam.name}: {fam.description}")
    cands = open_question_search(fam, CheckConfig(), budget,
                                 seed=1, param_samples=8)
    if not cands:
        print("  no candidate survived (consistent with (c) => (a))\n")
        continue
    for c in cands:
        print(f"  candidate params={c.params} a_margin={c.a_margin:+.3e} "
          f"c_best={c.c_best_margin:+.3e} reverified={c.reverified}")
    print()
