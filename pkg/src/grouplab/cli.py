"""Reproducible experiment runner.

Subcommands build groups, catalogs and families from a JSON config, run one
named experiment, and write defect tables and transforms under the output
directory with experiment-name prefixes.  Exit codes: 0 success, 2 config
error, 3 breach of a numerical invariant (Gram or Bessel).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import config as cfgmod
from .catalog import build_catalog, peter_weyl_basis
from .config import ConfigError, ExperimentConfig, InvariantBreach
from .groups import make_group
from .hilbert import coefficients, gram_tol
from .iwasawa import lift_family, make_iwasawa_model, max_reproduction_residual, reproduction_residual
from .parseval import transform_H
from .semicomplete import OmissionSpec, build_riemann_lebesgue_family, semicompleteness_defect

BESSEL_SLACK = 1e-9


def _build_family(cfg: ExperimentConfig, cat):
    if cfg.omit:
        return build_riemann_lebesgue_family(cat, OmissionSpec(omitted=cfg.omit))
    return peter_weyl_basis(cat)


def _check_gram(family, tol: float | None) -> None:
    limit = tol if tol is not None else gram_tol(family.group)
    defect = family.gram_defect()
    if defect > limit:
        raise InvariantBreach(
            f"family Gram defect {defect:.3e} exceeds tolerance {limit:.3e}"
        )


def cmd_catalog(cfg: ExperimentConfig) -> int:
    group = make_group(cfg.group_spec)
    cat = build_catalog(group, truncation=cfg.truncation)
    cfgmod.write_json(cfg.out_dir / f"{cfg.name}_catalog.json", cfgmod.catalog_json_obj(cat))
    if cfg.dump_coefficients:
        for lab in cat.labels:
            safe = lab.key.replace(":", "-")
            cfgmod.write_csv(
                cfg.out_dir / f"{cfg.name}_coeffs_{safe}.csv",
                ["node", "i", "j", "re", "im"],
                cfgmod.coefficient_grid_rows(cat, lab.key),
            )
    return 0


def cmd_parseval(cfg: ExperimentConfig) -> int:
    group = make_group(cfg.group_spec)
    cat = build_catalog(group, truncation=cfg.truncation)
    family = _build_family(cfg, cat)
    _check_gram(family, cfg.tol)
    ids, fns, _ = cfgmod.build_test_set(
        cfg.test_set_spec, group, family, seed_override=cfg.seed_override
    )
    rows = []
    for fid, f in zip(ids, fns):
        c = coefficients(f, family)
        norm_sq = f.norm_sq()
        coeff_sum = float(np.sum(np.abs(c) ** 2))
        defect = norm_sq - coeff_sum
        if defect < -BESSEL_SLACK:
            raise InvariantBreach(f"Bessel inequality violated for {fid}: defect {defect:.3e}")
        rows.append((fid, norm_sq, coeff_sum, defect))
    cfgmod.write_csv(
        cfg.out_dir / f"{cfg.name}_parseval.csv",
        ["fn_id", "norm_sq", "coeff_sum_sq", "defect"],
        rows,
    )
    return 0


def cmd_semicomplete(cfg: ExperimentConfig) -> int:
    group = make_group(cfg.group_spec)
    cat = build_catalog(group, truncation=cfg.truncation)
    family = _build_family(cfg, cat)
    _check_gram(family, cfg.tol)
    weights = cfgmod.build_weights(
        cfg.weights_spec, family.max_block_size, seed_override=cfg.seed_override
    )
    ids, fns, descriptor = cfgmod.build_test_set(
        cfg.test_set_spec, group, family, seed_override=cfg.seed_override
    )
    if not fns:
        raise ConfigError("semicomplete needs a nonempty test set")
    report = semicompleteness_defect(
        family,
        weights,
        cat,
        fns,
        epsilon=cfg.epsilon,
        test_set_name=descriptor,
        function_ids=ids,
    )
    cfgmod.write_json(
        cfg.out_dir / f"{cfg.name}_semicomplete.json", cfgmod.report_json_obj(report)
    )
    cfgmod.write_csv(
        cfg.out_dir / f"{cfg.name}_semicomplete.csv",
        ["fn", "defect"],
        report.per_function,
    )
    return 0


def cmd_isometry(cfg: ExperimentConfig) -> int:
    group = make_group(cfg.group_spec)
    cat = build_catalog(group, truncation=cfg.truncation)
    family = _build_family(cfg, cat)
    _check_gram(family, cfg.tol)
    ids, fns, _ = cfgmod.build_test_set(
        cfg.test_set_spec, group, family, seed_override=cfg.seed_override
    )
    rows = []
    for fid, f in zip(ids, fns):
        seq = transform_H(f, family)
        norm_sq = f.norm_sq()
        seq_norm_sq = seq.norm_sq()
        if norm_sq - seq_norm_sq < -BESSEL_SLACK:
            raise InvariantBreach(
                f"Bessel inequality violated for {fid}: sequence norm exceeds function norm"
            )
        rows.append((fid, norm_sq, seq_norm_sq, abs(norm_sq - seq_norm_sq)))
    cfgmod.write_csv(
        cfg.out_dir / f"{cfg.name}_isometry.csv",
        ["fn_id", "norm_sq", "seq_norm_sq", "defect"],
        rows,
    )
    return 0


def cmd_lift(cfg: ExperimentConfig) -> int:
    if cfg.iwasawa is None:
        raise ConfigError("lift needs an 'iwasawa' block in the config")
    iw = cfg.iwasawa
    try:
        model = make_iwasawa_model(
            iw.k_spec, iw.a_range, iw.n_range, iw.a_size, iw.n_size, profile=iw.profile
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cat_k = build_catalog(model.K, truncation=iw.truncation)
    if cfg.omit:
        xi = build_riemann_lebesgue_family(cat_k, OmissionSpec(omitted=cfg.omit))
    else:
        xi = peter_weyl_basis(cat_k)
    _check_gram(xi, cfg.tol)
    lifted = lift_family(model, xi)

    restricted = lifted.restrict_to_k()
    restriction_residual = float(np.max(np.abs(restricted.members - xi.members))) if xi.n_members else 0.0
    gram_residual = float(np.max(np.abs(lifted.gram_matrix() - xi.gram_matrix())))
    lifted_gram = lifted.gram_matrix()
    norm_residual = float(np.max(np.abs(np.diag(lifted_gram) - 1.0)))
    obj = {
        "group": model.K.name,
        "profile": model.profile_name,
        "n_members": xi.n_members,
        "restriction_residual": restriction_residual,
        "gram_residual": gram_residual,
        "norm_residual": norm_residual,
        "condition_i_residual": model.condition_i_residual(),
        "condition_ii_residual": model.condition_ii_residual(),
        "reproduction": {
            "at_identity": reproduction_residual(model),
            "max_over_grid": max_reproduction_residual(model),
        },
    }
    cfgmod.write_json(cfg.out_dir / f"{cfg.name}_lift.json", obj)
    return 0


COMMANDS = {
    "catalog": cmd_catalog,
    "parseval": cmd_parseval,
    "semicomplete": cmd_semicomplete,
    "isometry": cmd_isometry,
    "lift": cmd_lift,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="grouplab",
        description="harmonic-analysis experiments on concrete compact groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="override config seeds")
        p.add_argument("--tol", type=float, default=None, help="override config tolerance")
    args = parser.parse_args(argv)

    try:
        cfg = cfgmod.load_config(
            args.config,
            out_override=args.out,
            seed_override=args.seed,
            tol_override=args.tol,
        )
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantBreach as exc:
        print(f"numerical invariant failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
