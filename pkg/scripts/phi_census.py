"""Run the Phi reduction over random identities that hold in F∨E.

Random words are shuffled inside their blocks, balanced, and reduced.  The
script tallies which case handled each swap and which members came out, and
with ``--verify N`` checks the first N reductions by bounded derivation in
both directions.
"""

import argparse
import json
import random
import sys
from collections import Counter
from dataclasses import asdict, dataclass

from monoidvar.identities import Identity, fve_holds, preset_list
from monoidvar.reductions import phi_basis, well_balance
from monoidvar.rewrite import SearchBudget, derivable
from monoidvar.words import Decomposition, decompose, render


@dataclass
class Config:
    samples: int = 500
    letters: str = "xyzt"
    min_len: int = 4
    max_len: int = 9
    verify: int = 0
    verify_steps: int = 10
    seed: int = 7


def random_identity(rng: random.Random, cfg: Config) -> Identity:
    w = tuple(rng.choice(cfg.letters) for _ in range(rng.randint(cfg.min_len, cfg.max_len)))
    d = decompose(w)
    blocks = tuple(tuple(rng.sample(b, len(b))) for b in d.blocks)
    return Identity(w, Decomposition(d.dividers, blocks).reassemble())


def census(cfg: Config) -> dict:
    rng = random.Random(cfg.seed)
    O = preset_list("O")
    cases, members, sizes = Counter(), Counter(), Counter()
    verified, unknown = 0, []
    budget = SearchBudget(max_steps=cfg.verify_steps, max_word_len=cfg.max_len + 2, max_states=1_000_000)
    for n in range(cfg.samples):
        ident = random_identity(rng, cfg)
        assert fve_holds(ident)
        res = phi_basis(well_balance(ident).identity)
        cases.update(res.cases())
        members.update(str(m) for m in res.members)
        sizes[len(res.members)] += 1
        if n < cfg.verify and res.members:
            ids = res.identities()
            both = derivable(ident.lhs, ident.rhs, O + ids, budget) is not None and all(
                derivable(m.lhs, m.rhs, O + [ident], budget) is not None for m in ids
            )
            verified += both
            if not both:
                unknown.append(f"{render(ident.lhs)} == {render(ident.rhs)}")
    return {
        "config": asdict(cfg),
        "cases": dict(sorted(cases.items())),
        "members": dict(members.most_common()),
        "members_per_identity": dict(sorted(sizes.items())),
        "verified": verified,
        "unknown_within_budget": unknown,
    }


def main() -> int:
    cfg = Config()
    p = argparse.ArgumentParser(description=__doc__)
    for name, value in asdict(cfg).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    report = census(Config(**vars(p.parse_args())))
    print(json.dumps(report, indent=2, ensure_ascii=False))
    return 0


if __name__ == "__main__":
    sys.exit(main())
