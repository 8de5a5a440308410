"""Build the τ-quotient generated by xzyx^k t y^l and check the J identities.

Saturates the reduced factor set, builds the monoid, and checks ID-A..ID-D
together with J(n, π) for every permutation π of 1..n up to ``--max-n``.
"""

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass

from monoidvar.identities import j_basis
from monoidvar.monoids import saturate_j_generator, satisfies, tau_quotient, validate
from monoidvar.words import render, word_key


@dataclass
class Config:
    k_max: int = 3
    l_max: int = 3
    max_n: int = 2
    show_words: bool = False


def run(cfg: Config) -> dict:
    t0 = time.perf_counter()
    words, stable = saturate_j_generator(cfg.k_max, cfg.l_max)
    M = tau_quotient(words)
    out = {
        "config": asdict(cfg),
        "words": len(words),
        "stabilized": stable,
        "monoid_size": len(M),
        "problems": validate(M),
        "checks": [],
    }
    if cfg.show_words:
        out["word_list"] = [render(w) for w in sorted(words, key=word_key)]
    for ident in j_basis(cfg.max_n):
        t = time.perf_counter()
        r = satisfies(M, ident)
        out["checks"].append({
            "identity": ident.label or str(ident),
            "holds": r.holds,
            "substitutions": r.checked,
            "seconds": round(time.perf_counter() - t, 3),
        })
    out["seconds"] = round(time.perf_counter() - t0, 2)
    return out


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-max", type=int, default=Config.k_max)
    p.add_argument("--l-max", type=int, default=Config.l_max)
    p.add_argument("--max-n", type=int, default=Config.max_n)
    p.add_argument("--show-words", action="store_true")
    a = p.parse_args()
    report = run(Config(a.k_max, a.l_max, a.max_n, a.show_words))
    print(json.dumps(report, indent=2))
    ok = not report["problems"] and all(c["holds"] for c in report["checks"])
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
