"""Command-line front end.

Subcommands: ``train`` (one cell), ``sweep`` (the seed-by-epsilon
grid), ``summarize`` (rebuild a summary from a raw CSV), ``ssd``
(induce and classify a dilemma from a stage game), and
``meanfield-demo`` (drift metrics of the mean-field attacks).

Option values resolve in three layers: built-in defaults, then a
``--config`` file of flat ``key=value`` lines, then explicit flags.
"""

import argparse
import sys

import numpy as np

from . import capi, harness, meanfield, ssd
from .attacks import AttackSpec
from .tradecomm import GameConfig

DEFAULTS = {
    "items": 4,
    "utterances": 4,
    "episodes": 2000,
    "seeds": "0,1,2,3,4",
    "epsilons": "0,0.3,0.5,0.7",
    "attack": "none",
    "jobs": 1,
    "out": None,
    "eval_every": 20,
    "candidates": 64,
    "perturb_eval": False,
    # ssd keys
    "r": 3.0,
    "p": 1.0,
    "s": 0.0,
    "t": 5.0,
    "gamma": 0.9,
}


def _coerce(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def load_config(path):
    """Flat key=value file; blank lines and # comments are skipped."""
    out = {}
    with open(path, "r", encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            out[key.strip().replace("-", "_")] = _coerce(val.strip())
    return out


def _resolve(args, config):
    """Built-in defaults, overridden by config file, overridden by flags."""
    merged = dict(DEFAULTS)
    for k, v in config.items():
        if k not in merged:
            raise ValueError(f"unknown config key {k!r}")
        merged[k] = v
    for k in merged:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def _parse_int_list(text):
    try:
        return tuple(int(x) for x in str(text).split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}")


def _parse_float_list(text):
    try:
        return tuple(float(x) for x in str(text).split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}")


def _parse_attack(text):
    if text == "none":
        return None
    if text.startswith("fgsm:"):
        return AttackSpec("fgsm", float(text.split(":", 1)[1]))
    raise ValueError(f"expected 'none' or 'fgsm:<epsilon>', got {text!r}")


def _add_common(p):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--items", type=int)
    p.add_argument("--utterances", type=int)
    p.add_argument("--episodes", type=int)
    p.add_argument("--seeds", help="comma-separated seed values")
    p.add_argument("--eval-every", type=int, dest="eval_every")
    p.add_argument("--candidates", type=int)
    p.add_argument("--out")
    p.add_argument(
        "--perturb-eval", action="store_const", const=True, dest="perturb_eval",
        help="report eval curves under the training-time perturbation",
    )


def build_parser():
    ap = argparse.ArgumentParser(prog="coopadv")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one (seed, epsilon) cell")
    _add_common(p)
    p.add_argument("--attack", help="'none' or 'fgsm:<epsilon>'")

    p = sub.add_parser("sweep", help="run the full seed-by-epsilon grid")
    _add_common(p)
    p.add_argument("--epsilons", help="comma-separated epsilon values")
    p.add_argument("--jobs", type=int, help="concurrent training processes")

    p = sub.add_parser("summarize", help="aggregate a raw CSV into a summary")
    p.add_argument("raw", help="path to a raw sweep CSV")
    p.add_argument("--out")

    p = sub.add_parser("ssd", help="induce and classify a dilemma")
    p.add_argument("--config", help="keys r,p,s,t stage payoffs and gamma")
    p.add_argument("--episodes", type=int)
    p.add_argument("--seeds")
    p.add_argument("--out")

    p = sub.add_parser("meanfield-demo", help="mean-field attack drift metrics")
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--seeds")
    p.add_argument("--out")
    return ap


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _game_and_capi(opt):
    game = GameConfig(opt["items"], opt["utterances"])
    cfg = capi.CapiConfig(
        episodes=opt["episodes"],
        candidates=opt["candidates"],
        eval_every=opt["eval_every"],
    )
    return game, cfg


def cmd_train(opt):
    game, cfg = _game_and_capi(opt)
    seed = _parse_int_list(opt["seeds"])[0]
    attack = _parse_attack(opt["attack"])
    eps = 0.0 if attack is None else attack.epsilon
    rows = harness.run_cell(
        game, cfg, seed, eps, eps_index=0, perturb_eval=bool(opt["perturb_eval"])
    )
    lines = [harness.RAW_HEADER] + [
        f"{s},{e!r},{ep},{ret!r},{kind}" for s, e, ep, ret, kind in rows
    ]
    _emit(lines, opt["out"])
    return 0


def cmd_sweep(opt):
    game, cfg = _game_and_capi(opt)
    sweep = harness.SweepConfig(
        game=game,
        capi=cfg,
        epsilons=_parse_float_list(opt["epsilons"]),
        seeds=_parse_int_list(opt["seeds"]),
        output_dir=opt["out"] if opt["out"] is not None else "sweep_out",
        perturb_eval=bool(opt["perturb_eval"]),
        jobs=opt["jobs"],
    )
    raw, summary = harness.run_sweep(sweep)
    print(f"raw: {raw}")
    print(f"summary: {summary}")
    return 0


def cmd_summarize(args):
    rows = harness.summarize(args.raw, args.out)
    if args.out is None:
        lines = [harness.SUMMARY_HEADER] + [
            f"{r.epsilon!r},{r.episode},{r.mean_return!r},"
            f"{r.ci95_low!r},{r.ci95_high!r},{r.optimal_frequency!r}"
            for r in rows
        ]
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_ssd(opt):
    game = ssd.prisoners_dilemma(opt["r"], opt["p"], opt["s"], opt["t"])
    rng = np.random.default_rng(_parse_int_list(opt["seeds"])[0])
    m = ssd.induce_mgsd(
        game, ssd.ALWAYS_COOPERATE, ssd.ALWAYS_DEFECT,
        episodes=opt["episodes"], gamma=opt["gamma"], rng=rng,
    )
    v = ssd.classify(m)
    lines = [
        "R,P,S,T,is_dilemma,greed,fear,failed_conditions",
        f"{m.R!r},{m.P!r},{m.S!r},{m.T!r},{v.is_dilemma},{v.greed},{v.fear},"
        + ";".join(v.failed_conditions),
    ]
    _emit(lines, opt["out"])
    return 0


def cmd_meanfield_demo(opt):
    rng = np.random.default_rng(_parse_int_list(opt["seeds"])[0])
    batch = meanfield.ObservationBatch(rng.normal(size=(10, 8)))
    direction = np.zeros(8)
    direction[0] = 1.0
    lines = ["metric,x,value"]
    for n in range(1, batch.num_agents + 1):
        shifted = meanfield.coordinated_bias_attack(batch, n, 0.1, direction)
        lines.append(f"mean_shift_norm,{n},{meanfield.mean_shift_norm(batch, shifted)!r}")
    dist = meanfield.ActionDistribution(rng.dirichlet(np.ones(4)))
    for lam in np.linspace(0.0, 1.0, 11):
        ent = meanfield.entropy(meanfield.uniformize(dist, float(lam)))
        lines.append(f"entropy,{float(lam)!r},{ent!r}")
    _emit(lines, opt["out"])
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "summarize":
            return cmd_summarize(args)
        config = load_config(args.config) if getattr(args, "config", None) else {}
        opt = _resolve(args, config)
        if args.command == "train":
            return cmd_train(opt)
        if args.command == "sweep":
            return cmd_sweep(opt)
        if args.command == "ssd":
            return cmd_ssd(opt)
        if args.command == "meanfield-demo":
            return cmd_meanfield_demo(opt)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
