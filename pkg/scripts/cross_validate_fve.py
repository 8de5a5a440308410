"""Compare the divider criterion for F∨E with relatively free objects of F and E.

Exhaustive over short words on a small alphabet, optionally followed by a
random sample on a larger one.  Prints a JSON summary and exits non-zero on
any disagreement.
"""

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass

from monoidvar.identities import Identity, fve_holds, preset_list
from monoidvar.rewrite import FreeObjectCaps, free_object
from monoidvar.words import all_words, render


@dataclass
class Config:
    letters: str = "xy"
    max_side: int = 5
    free_len: int = 7
    sample_letters: str = "xyz"
    sample_side: int = 6
    sample: int = 1000
    seed: int = 5


def classes(letters: str, free_len: int):
    F, E = preset_list("F"), preset_list("E")
    caps = FreeObjectCaps(max_len=free_len)
    f, e = free_object(F, tuple(letters), caps), free_object(E, tuple(letters), caps)
    if not (f.stable and e.stable):
        raise SystemExit(f"free objects on {letters} not stable: {f.reason or 'ok'} / {e.reason or 'ok'}")
    return f, e


def exhaustive(cfg: Config) -> dict:
    f, e = classes(cfg.letters, cfg.free_len)
    ws = list(all_words(cfg.letters, cfg.max_side))
    key = {w: (f.element(w), e.element(w)) for w in ws}
    bad, positives, total = [], 0, 0
    for i, u in enumerate(ws):
        for v in ws[i:]:
            oracle = key[u] == key[v]
            total += 1
            positives += oracle and u != v
            if fve_holds(Identity(u, v)) != oracle:
                bad.append(f"{render(u)} == {render(v)}")
    return {"identities": total, "positives": positives, "disagreements": bad[:20], "classes": (len(f.monoid), len(e.monoid))}


def sampled(cfg: Config) -> dict:
    f, e = classes(cfg.sample_letters, cfg.free_len)
    pool = list(all_words(cfg.sample_letters, cfg.sample_side))
    groups: dict = {}
    for w in pool:
        groups.setdefault((f.element(w), e.element(w)), []).append(w)
    rng = random.Random(cfg.seed)
    bad, positives = [], 0
    for n in range(cfg.sample):
        u = rng.choice(pool)
        # alternate uniform pairs with pairs from one class
        v = rng.choice(pool) if n % 2 else rng.choice(groups[(f.element(u), e.element(u))])
        oracle = f.equal(u, v) and e.equal(u, v)
        positives += oracle and u != v
        if fve_holds(Identity(u, v)) != oracle:
            bad.append(f"{render(u)} == {render(v)}")
    return {"identities": cfg.sample, "positives": positives, "disagreements": bad[:20]}


def main() -> int:
    cfg = Config()
    p = argparse.ArgumentParser(description=__doc__)
    for name, value in asdict(cfg).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    args = p.parse_args()
    cfg = Config(**vars(args))
    t0 = time.perf_counter()
    report = {"config": asdict(cfg), "exhaustive": exhaustive(cfg)}
    if cfg.sample:
        report["sampled"] = sampled(cfg)
    report["seconds"] = round(time.perf_counter() - t0, 2)
    print(json.dumps(report, indent=2))
    failed = report["exhaustive"]["disagreements"] or report.get("sampled", {}).get("disagreements")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
