"""Command-line entry point.

Commands: gen-data, fit, transform, train, evaluate, sweep, diagnose,
importance.  Every command is a pure function of (configuration, seed) to
its output files: identical invocations produce byte-identical outputs, for
any --threads value.

Options resolve in three layers: built-in defaults, then a JSON --config
document (keys are the option names with underscores), then explicit flags.
Config errors exit with status 1 and a field/line message; runtime failures
exit with status 2.  Output files are written atomically (temp file plus
rename), so a failed run never leaves partial outputs.  Relative output
paths are resolved against $SAMPLING_ENCODER_OUTPUT_DIR when it is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import data as dmod
from . import diagnostics as diag
from . import learners as lmod
from .encoder import SamplingBayesianEncoder, TargetMeanEncoder
from .rng import derive_key

OUTPUT_DIR_ENV = "SAMPLING_ENCODER_OUTPUT_DIR"


class ConfigError(Exception):
    """Invalid configuration (bad flag, field or config document)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 1
        raise ConfigError(message)


def _resolve_out(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _atomic_write(path: str, text: str) -> None:
    path = _resolve_out(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [repr(float(c)) if isinstance(c, (float, np.floating)) else c for c in row]
        )
    return buf.getvalue()


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path}: top level must be a JSON object")
    return doc


def _resolve(args: argparse.Namespace, config: dict, defaults: dict) -> dict:
    """Layer flag values over config values over defaults."""
    unknown = set(config) - set(defaults) - {"command"}
    if unknown:
        raise ConfigError(f"config field(s) not recognised: {sorted(unknown)}")
    out = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in config:
            out[key] = config[key]
        else:
            out[key] = default
    missing = [k for k, v in out.items() if v is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required option(s): {sorted(missing)}")
    return out


_REQUIRED = object()


def _load_dataset(opts: dict) -> dmod.Dataset:
    schema_path = opts["schema"] or opts["data"] + ".schema.json"
    try:
        columns, task = dmod.read_schema(schema_path)
    except FileNotFoundError:
        raise ConfigError(f"schema file not found: {schema_path}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        return dmod.read_csv(opts["data"], columns, task)
    except FileNotFoundError:
        raise ConfigError(f"data file not found: {opts['data']}") from None


def _build_encoder(opts: dict, task: str):
    if opts["encoder"] == "sampling":
        return SamplingBayesianEncoder(
            task=task,
            gamma=float(opts["gamma"]),
            k_draws=int(opts["k_draws"]),
            mapping=opts["mapping"],
            master_seed=int(opts["seed"]),
            unseen_policy=opts["unseen_policy"],
            mode=opts["mode"],
        )
    if opts["encoder"] == "target-mean":
        return TargetMeanEncoder(
            sigma=float(opts["sigma"]),
            leave_one_out=bool(opts["leave_one_out"]),
            master_seed=int(opts["seed"]),
        )
    raise ConfigError(f"unknown encoder {opts['encoder']!r}")


def _build_learner(opts: dict, task: str):
    kind = opts["learner"]
    if kind == "forest":
        if task == "regression":
            raise ConfigError("forest learner supports classification tasks only")
        return lmod.RandomForestClassifier(
            n_trees=int(opts["n_trees"]),
            max_depth=int(opts["max_depth"]),
            min_leaf=int(opts["min_leaf"]),
            features_per_split=opts["features_per_split"],
            master_seed=int(opts["seed"]) + 1,
            threads=int(opts["threads"]),
        )
    if kind == "logistic":
        return lmod.LogisticClassifier(
            learning_rate=float(opts["learning_rate"]),
            epochs=int(opts["epochs"]),
            l2=float(opts["l2"]),
        )
    if kind == "ridge":
        return lmod.RidgeRegressor(l2=float(opts["l2"]))
    raise ConfigError(f"unknown learner {kind!r}")


_ENCODER_DEFAULTS = {
    "encoder": "sampling",
    "gamma": 0.0,
    "k_draws": 4,
    "mapping": "mean_only",
    "unseen_policy": "sample-from-prior",
    "mode": "sample",
    "sigma": 0.0,
    "leave_one_out": False,
}

_LEARNER_DEFAULTS = {
    "learner": "forest",
    "n_trees": 16,
    "max_depth": 8,
    "min_leaf": 5,
    "features_per_split": "sqrt",
    "learning_rate": 0.5,
    "epochs": 2000,
    "l2": 0.0,
}


def _add_common(sub):
    sub.add_argument("--config", help="JSON config document; flags override it")
    sub.add_argument("--seed", type=int, help="master seed (default 0)")
    sub.add_argument("--threads", type=int, help="worker cap (default 1)")


def _add_data_opts(sub):
    sub.add_argument("--data", help="input CSV path")
    sub.add_argument("--schema", help="schema JSON (default: <data>.schema.json)")


def _add_encoder_opts(sub):
    sub.add_argument("--encoder", choices=["sampling", "target-mean"])
    sub.add_argument("--gamma", type=float)
    sub.add_argument("--k-draws", dest="k_draws", type=int)
    sub.add_argument("--mapping")
    sub.add_argument("--unseen-policy", dest="unseen_policy")
    sub.add_argument("--mode", choices=["sample", "mean"])
    sub.add_argument("--sigma", type=float, help="target-mean noise scale")
    sub.add_argument(
        "--leave-one-out", dest="leave_one_out", action="store_const", const=True,
        help="target-mean leave-one-out fitting",
    )


def _add_learner_opts(sub):
    sub.add_argument("--learner", choices=["forest", "logistic", "ridge"])
    sub.add_argument("--n-trees", dest="n_trees", type=int)
    sub.add_argument("--max-depth", dest="max_depth", type=int)
    sub.add_argument("--min-leaf", dest="min_leaf", type=int)
    sub.add_argument("--features-per-split", dest="features_per_split")
    sub.add_argument("--learning-rate", dest="learning_rate", type=float)
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--l2", type=float)


def build_parser() -> _Parser:
    parser = _Parser(prog="sampling-encoder", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    g = subs.add_parser("gen-data", help="write a synthetic dataset CSV + schema")
    _add_common(g)
    g.add_argument("--kind", choices=["classification_blobs", "hastie_quadratic"])
    g.add_argument("--rows", type=int)
    g.add_argument("--features", type=int)
    g.add_argument("--informative", type=int)
    g.add_argument("--categorical", type=int)
    g.add_argument("--bins-min", dest="bins_min", type=int)
    g.add_argument("--bins-max", dest="bins_max", type=int)
    g.add_argument("--class-sep", dest="class_sep", type=float)
    g.add_argument("--label-noise", dest="label_noise", type=float)
    g.add_argument("--out")

    f = subs.add_parser("fit", help="fit the sampling encoder, write the model document")
    _add_common(f)
    _add_data_opts(f)
    _add_encoder_opts(f)
    f.add_argument("--out")

    t = subs.add_parser("transform", help="write the K*N-row encoded CSV")
    _add_common(t)
    _add_data_opts(t)
    t.add_argument("--model")
    t.add_argument("--k-draws", dest="k_draws", type=int)
    t.add_argument("--out")

    tr = subs.add_parser("train", help="train a learner on the encoded data")
    _add_common(tr)
    _add_data_opts(tr)
    _add_learner_opts(tr)
    tr.add_argument("--model")
    tr.add_argument("--out")

    e = subs.add_parser("evaluate", help="cross-validated metric CSV")
    _add_common(e)
    _add_data_opts(e)
    _add_encoder_opts(e)
    _add_learner_opts(e)
    e.add_argument("--folds", type=int)
    e.add_argument("--metric", choices=["accuracy", "r2"])
    e.add_argument("--out")

    s = subs.add_parser("sweep", help="cross-validated metric per hyperparameter value")
    _add_common(s)
    _add_data_opts(s)
    _add_encoder_opts(s)
    _add_learner_opts(s)
    s.add_argument("--param", choices=["gamma", "k_draws", "mapping"])
    s.add_argument("--values", help="comma-separated sweep values")
    s.add_argument("--folds", type=int)
    s.add_argument("--metric", choices=["accuracy", "r2"])
    s.add_argument("--out")

    d = subs.add_parser("diagnose", help="loss decomposition, Laplace and noise reports")
    _add_common(d)
    _add_data_opts(d)
    d.add_argument("--draws", type=int)
    d.add_argument("--out-dir", dest="out_dir")

    i = subs.add_parser("importance", help="grouped importances, two encoders side by side")
    _add_common(i)
    _add_data_opts(i)
    _add_encoder_opts(i)
    _add_learner_opts(i)
    i.add_argument("--out")
    return parser


# --- commands -----------------------------------------------------------------


def _cmd_gen_data(args) -> None:
    config = _load_config(args.config)
    opts = _resolve(
        args,
        config,
        {
            "kind": "classification_blobs",
            "rows": 10_000,
            "features": 10,
            "informative": 5,
            "categorical": 2,
            "bins_min": 10,
            "bins_max": 20,
            "class_sep": 1.0,
            "label_noise": 0.0,
            "seed": 0,
            "threads": 1,
            "out": _REQUIRED,
        },
    )
    try:
        spec = dmod.GeneratorSpec(
            kind=opts["kind"],
            n_rows=int(opts["rows"]),
            n_features=int(opts["features"]),
            n_informative=int(opts["informative"]),
            n_categorical=int(opts["categorical"]),
            bins_per_categorical=(int(opts["bins_min"]), int(opts["bins_max"])),
            class_sep=float(opts["class_sep"]),
            label_noise=float(opts["label_noise"]),
            seed=int(opts["seed"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ds = dmod.generate(spec)
    buf = io.StringIO()
    _write_dataset_text(ds, buf)
    _atomic_write(opts["out"], buf.getvalue())
    _atomic_write(
        opts["out"] + ".schema.json",
        json.dumps(dmod.schema_to_document(ds), indent=2, sort_keys=True) + "\n",
    )


def _write_dataset_text(ds: dmod.Dataset, buf) -> None:
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow([c.name for c in ds.columns])
    numeric_target = ds.task != "multiclass"
    kinds = [c.kind for c in ds.columns]
    for row in ds.values:
        out = []
        for kind, cell in zip(kinds, row):
            if kind == "categorical" or (kind == "target" and not numeric_target):
                out.append(cell)
            else:
                out.append(repr(float(cell)))
        writer.writerow(out)


def _cmd_fit(args) -> None:
    config = _load_config(args.config)
    opts = _resolve(
        args,
        config,
        {
            **_ENCODER_DEFAULTS,
            "data": _REQUIRED,
            "schema": None,
            "seed": 0,
            "threads": 1,
            "out": _REQUIRED,
        },
    )
    if opts["encoder"] != "sampling":
        raise ConfigError("fit writes sampling-encoder models; --encoder must be 'sampling'")
    ds = _load_dataset(opts)
    enc = _build_encoder(opts, ds.task)
    enc.fit(ds.feature_matrix(), ds.target(), feature_names=ds.feature_names())
    _atomic_write(opts["out"], enc.to_json())


def _cmd_transform(args) -> None:
    config = _load_config(args.config)
    opts = _resolve(
        args,
        config,
        {
            "data": _REQUIRED,
            "schema": None,
            "model": _REQUIRED,
            "k_draws": None,
            "seed": None,  # default: the fitted model's master seed
            "threads": 1,
            "out": _REQUIRED,
        },
    )
    ds = _load_dataset(opts)
    try:
        enc = SamplingBayesianEncoder.load(opts["model"])
    except FileNotFoundError:
        raise ConfigError(f"model file not found: {opts['model']}") from None
    k = int(opts["k_draws"]) if opts["k_draws"] is not None else None
    seed = int(opts["seed"]) if opts["seed"] is not None else None
    encoded = enc.transform_augment(
        ds.feature_matrix(), ds.target(), k_draws=k, seed=seed, threads=int(opts["threads"])
    )
    header = ["origin_row", "draw"] + encoded.feature_names + ["y"]
    rows = [
        [int(o), int(d)] + [float(v) for v in frow] + [yv]
        for o, d, frow, yv in zip(
            encoded.origin_row, encoded.draw_index, encoded.features, encoded.y
        )
    ]
    _atomic_write(opts["out"], _csv_text(header, rows))


def _cmd_train(args) -> None:
    config = _load_config(args.config)
    opts = _resolve(
        args,
        config,
        {
            **_LEARNER_DEFAULTS,
            "data": _REQUIRED,
            "schema": None,
            "model": _REQUIRED,
            "seed": 0,
            "threads": 1,
            "out": _REQUIRED,
        },
    )
    ds = _load_dataset(opts)
    try:
        enc = SamplingBayesianEncoder.load(opts["model"])
    except FileNotFoundError:
        raise ConfigError(f"model file not found: {opts['model']}") from None
    learner = _build_learner(opts, ds.task)
    encoded = enc.transform_augment(
        ds.feature_matrix(), ds.target(), threads=int(opts["threads"])
    )
    learner.fit(encoded.features, encoded.y)
    doc = {
        "format": "sampling-encoder-learner",
        "version": 1,
        "learner": opts["learner"],
        "feature_names": encoded.feature_names,
        "model": _learner_doc(learner),
    }
    _atomic_write(opts["out"], json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _learner_doc(model) -> dict:
    if isinstance(model, lmod.RidgeRegressor):
        return {
            "coef": model.coef_.tolist(),
            "intercept": model.intercept_,
            "feature_stds": model.feature_stds_.tolist(),
        }
    if isinstance(model, lmod.LogisticClassifier):
        return {
            "coef": model.coef_.tolist(),
            "intercept": model.intercept_,
            "feature_stds": model.feature_stds_.tolist(),
        }
    return {
        "classes": model.classes_.tolist(),
        "feature_importances": model.feature_importances_.tolist(),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "probs": t.probs.tolist(),
            }
            for t in model.trees_
        ],
    }


def _cv_options(args, extra: dict) -> dict:
    config = _load_config(args.config)
    return _resolve(
        args,
        config,
        {
            **_ENCODER_DEFAULTS,
            **_LEARNER_DEFAULTS,
            "data": _REQUIRED,
            "schema": None,
            "folds": 5,
            "metric": None,
            "seed": 0,
            "threads": 1,
            **extra,
        },
    )


def _cmd_evaluate(args) -> None:
    opts = _cv_options(args, {"out": _REQUIRED})
    ds = _load_dataset(opts)
    enc = _build_encoder(opts, ds.task)
    learner = _build_learner(opts, ds.task)
    res = lmod.cross_validate(
        enc,
        learner,
        ds.feature_matrix(),
        ds.target(),
        folds=int(opts["folds"]),
        metric=opts["metric"],
        seed=int(opts["seed"]),
        threads=int(opts["threads"]),
    )
    rows = [[i, res.metric, s] for i, s in enumerate(res.scores)]
    rows.append(["mean", res.metric, res.mean])
    rows.append(["std", res.metric, res.std])
    _atomic_write(opts["out"], _csv_text(["fold", "metric", "value"], rows))


def _cmd_sweep(args) -> None:
    opts = _cv_options(args, {"param": _REQUIRED, "values": _REQUIRED, "out": _REQUIRED})
    if opts["encoder"] != "sampling":
        raise ConfigError("sweep varies sampling-encoder hyperparameters")
    ds = _load_dataset(opts)
    param = opts["param"]
    raw = (
        opts["values"] if isinstance(opts["values"], list) else str(opts["values"]).split(",")
    )
    values: list = []
    for v in raw:
        if param == "gamma":
            values.append(float(v))
        elif param == "k_draws":
            values.append(int(v))
        else:
            values.append(str(v))
    if not values:
        raise ConfigError("sweep needs a non-empty values list")
    learner = _build_learner(opts, ds.task)
    rows = []
    metric = opts["metric"]
    for v in values:
        enc = _build_encoder(opts, ds.task)
        enc.set_params(**{param: v})
        res = lmod.cross_validate(
            enc,
            learner,
            ds.feature_matrix(),
            ds.target(),
            folds=int(opts["folds"]),
            metric=metric,
            seed=int(opts["seed"]),
            threads=int(opts["threads"]),
        )
        metric = res.metric
        rows.append([v, res.mean, res.std])
    _atomic_write(opts["out"], _csv_text([param, "mean_metric", "std_metric"], rows))


def _cmd_diagnose(args) -> None:
    config = _load_config(args.config)
    opts = _resolve(
        args,
        config,
        {
            "data": None,
            "schema": None,
            "draws": 2000,
            "seed": 0,
            "threads": 1,
            "out_dir": _REQUIRED,
        },
    )
    seed = int(opts["seed"])
    draws = int(opts["draws"])
    if draws < 2:
        raise ConfigError("--draws must be at least 2")
    sections = []

    if opts["data"]:
        ds = _load_dataset(opts)
        datasets = [ds]
    else:
        datasets = [_demo_regression(seed), _demo_binary(seed)]

    for ds in datasets:
        X, y = ds.feature_matrix(), ds.target()
        names = ds.feature_names()
        if ds.task == "regression":
            enc = SamplingBayesianEncoder(
                task="regression", gamma=0.0, k_draws=4, master_seed=seed
            ).fit(X, y, feature_names=names)
            model = lmod.RidgeRegressor(l2=1e-6)
            encoded = enc.transform_augment(X, y)
            model.fit(encoded.features, encoded.y)
            report = diag.mse_decompose(model.predict, enc, X, y, draws=draws, seed=seed)
            _atomic_write(
                os.path.join(opts["out_dir"], "decomposition.csv"),
                _csv_text(
                    ["mse_total", "mse0", "reg", "residual", "draws"],
                    [[report.mse_total, report.mse0, report.reg, report.residual, report.draws]],
                ),
            )
            sections.append(report.to_text())
            big = _largest_category_params(enc)
            est = diag.laplace_predict(lambda t: float(t[0] ** 2), big)
            _atomic_write(
                os.path.join(opts["out_dir"], "laplace.csv"),
                _csv_text(
                    ["base_prediction", "correction", "corrected_prediction"],
                    [[est.base_prediction,
                      est.corrected_prediction - est.base_prediction,
                      est.corrected_prediction]],
                ),
            )
            sections.append(est.to_text())
        elif ds.task == "binary":
            enc = SamplingBayesianEncoder(
                task="binary", gamma=0.0, k_draws=4, master_seed=seed
            ).fit(X, y, feature_names=names)
            report = diag.compare_noise_injection(enc, draws=draws, seed=seed)
            _atomic_write(
                os.path.join(opts["out_dir"], "noise_comparison.csv"),
                _csv_text(
                    ["column", "category", "n", "posterior_mean", "closed_form_std", "empirical_std"],
                    [
                        [r["column"], r["category"], r["n"], r["posterior_mean"],
                         r["closed_form_std"], r["empirical_std"]]
                        for r in report.rows
                    ],
                ),
            )
            sections.append(report.to_text())
        else:
            raise ConfigError("diagnose supports regression and binary tasks")
    _atomic_write(os.path.join(opts["out_dir"], "summary.txt"), "\n".join(sections))


def _largest_category_params(enc: SamplingBayesianEncoder):
    name = sorted(enc.posteriors_)[0]
    posts = enc.posteriors_[name]
    if enc.task == "binary":
        return max(posts.values(), key=lambda p: p.alpha + p.beta)
    return max(posts.values(), key=lambda p: p.nu)


def _demo_regression(seed: int) -> dmod.Dataset:
    from .rng import RandomStream

    stream = RandomStream(int(derive_key(seed, 0xD160)))
    sizes = [150, 60, 40, 30, 15, 5]
    effects = [0.0, 1.5, -1.0, 2.5, -2.0, 4.0]
    rows = []
    for c, (size, eff) in enumerate(zip(sizes, effects)):
        u1 = stream.uniforms(size)
        u2 = stream.uniforms(size)
        noise = np.sqrt(-2 * np.log(u1)) * np.cos(2 * np.pi * u2)
        xnum = stream.uniforms(size) * 2 - 1
        for i in range(size):
            rows.append([f"c{c}", xnum[i], eff + 0.8 * xnum[i] + 0.5 * noise[i]])
    values = np.array(rows, dtype=object)
    columns = [
        dmod.Column("group", "categorical"),
        dmod.Column("x0", "numeric"),
        dmod.Column("y", "target"),
    ]
    return dmod.Dataset(columns=columns, values=values, task="regression")


def _demo_binary(seed: int) -> dmod.Dataset:
    from .rng import RandomStream

    stream = RandomStream(int(derive_key(seed, 0xB14A)))
    sizes = [500, 200, 50, 5]
    rates = [0.5, 0.3, 0.7, 0.6]
    rows = []
    for c, (size, rate) in enumerate(zip(sizes, rates)):
        u = stream.uniforms(size)
        for i in range(size):
            rows.append([f"c{c}", 1.0 if u[i] < rate else 0.0])
    values = np.array(rows, dtype=object)
    columns = [dmod.Column("group", "categorical"), dmod.Column("y", "target")]
    return dmod.Dataset(columns=columns, values=values, task="binary")


def _cmd_importance(args) -> None:
    opts = _cv_options(args, {"out": _REQUIRED})
    ds = _load_dataset(opts)
    if ds.task == "regression":
        raise ConfigError("importance comparison uses the forest; classification tasks only")
    X, y, names = ds.feature_matrix(), ds.target(), ds.feature_names()
    learner = _build_learner(opts, ds.task)

    sampler = _build_encoder({**opts, "encoder": "sampling"}, ds.task)
    sampler.fit(X, y, feature_names=names)
    encoded = sampler.transform_augment(X, y, threads=int(opts["threads"]))
    model_s = lmod.clone(learner).fit(encoded.features, encoded.y)
    rep_s = lmod.importance_report(model_s, encoded.feature_names)

    baseline = TargetMeanEncoder(master_seed=int(opts["seed"]))
    F = baseline.fit_transform(X, y, feature_names=names)
    model_b = lmod.clone(learner).fit(F, y)
    rep_b = lmod.importance_report(model_b, baseline.get_feature_names_out())

    origins = list(dict.fromkeys([lmod.origin_feature(n) for n in names]))
    rows = [
        [name, rep_s.grouped.get(name, 0.0), rep_b.grouped.get(name, 0.0)]
        for name in origins
    ]
    _atomic_write(
        opts["out"], _csv_text(["feature", "sampling", "target_mean"], rows)
    )


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "fit": _cmd_fit,
    "transform": _cmd_transform,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "diagnose": _cmd_diagnose,
    "importance": _cmd_importance,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
