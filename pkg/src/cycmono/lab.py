"""
Reproducible Monte Carlo experiments over the random matrix models.

Four experiment kinds are provided:

  moments    paired columns Tr(word) vs the factorized product
             Tr(a-part) * prod tr(b-parts), from the same samples
  spectrum   empirical eigenvalues of a model polynomial vs the
             closed-form predicted spectrum
  decay      variance and fourth centered moment of Tr(word) across
             dimensions, with fitted log-log slopes
  tau-prime  the first-order trace correction n * tr_n(P) against its
             cyclic-monotone prediction

Words in configurations are lists of generator names; a letter "X@2"
means X conjugated by the per-trial Haar unitary number 2 (letters
sharing a tag share the unitary, distinct tags are independent), and a
trailing "*" takes the adjoint.  Every trial draws from its own
(master_seed, n_index, trial) stream, so results do not depend on
execution order.
"""
from __future__ import annotations

import json
import math
import re
import time
from dataclasses import dataclass, field, asdict
from fractions import Fraction

import numpy as np

from . import ncms, predict, rmt, spectra, symgroup, weingarten
from .errors import ConfigError
from .spectra import Spectrum

SCHEMA_VERSION = 1

SPECTRUM_MODELS = ("anticommutator", "commutator", "rotation-sum")

_B_KINDS_DEFAULT = {"ginibre", "haar_unitary", "gue", "wishart"}

_LETTER_RE = re.compile(r"^([^@*]+)(?:@(\d+))?(\*)?$")


@dataclass
class ExperimentConfig:
    experiment: str
    model: object
    generators: dict[str, dict] = field(default_factory=dict)
    n_list: tuple[int, ...] = ()
    trials: int = 1
    seed: int = 0
    out: str | None = None
    rotations: int = 1
    top_m: int = 16
    tolerances: dict[str, float] = field(default_factory=dict)


@dataclass
class ResultRecord:
    experiment_id: str
    config: dict
    per_n: list[dict]
    fits: dict | None
    seed: int
    wall_clock_seconds: float
    schema_version: int = SCHEMA_VERSION


def config_to_json(config: ExperimentConfig) -> dict:
    obj = asdict(config)
    obj["n_list"] = list(config.n_list)
    return obj


def config_from_json(obj: dict) -> ExperimentConfig:
    known = {
        "experiment", "model", "generators", "n_list", "trials", "seed",
        "out", "rotations", "top_m", "tolerances",
    }
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if "experiment" not in obj:
        raise ConfigError("config needs an 'experiment' field")
    cfg = ExperimentConfig(
        experiment=obj["experiment"],
        model=obj.get("model"),
        generators=dict(obj.get("generators", {})),
        n_list=tuple(obj.get("n_list", ())),
        trials=int(obj.get("trials", 1)),
        seed=int(obj.get("seed", 0)),
        out=obj.get("out"),
        rotations=int(obj.get("rotations", 1)),
        top_m=int(obj.get("top_m", 16)),
        tolerances=dict(obj.get("tolerances", {})),
    )
    return cfg


def record_to_json(record: ResultRecord, include_wall_clock: bool = True) -> str:
    obj = asdict(record)
    if not include_wall_clock:
        obj.pop("wall_clock_seconds")
    return json.dumps(obj, sort_keys=True, indent=2)


@dataclass(frozen=True)
class _WordLetter:
    name: str
    tag: int  # 0 means unrotated
    star: bool


def _parse_letter(text: str) -> _WordLetter:
    match = _LETTER_RE.match(text)
    if not match:
        raise ConfigError(f"malformed word letter {text!r}")
    name, tag, star = match.groups()
    return _WordLetter(name, int(tag) if tag else 0, star is not None)


def _parse_word(letters) -> tuple[_WordLetter, ...]:
    if not letters:
        raise ConfigError("empty word in model")
    return tuple(_parse_letter(str(x)) for x in letters)


def _generator_family(name: str, spec: dict) -> str:
    family = spec.get("family")
    if family is None:
        family = "b" if spec.get("kind") in _B_KINDS_DEFAULT else "a"
    if family not in ("a", "b"):
        raise ConfigError(f"generator {name!r} has invalid family {family!r}")
    return family


def _ensemble(name: str, spec: dict) -> rmt.EnsembleSpec:
    kind = spec.get("kind")
    if kind not in rmt.EnsembleSpec.KINDS:
        raise ConfigError(f"generator {name!r} has unknown kind {kind!r}")
    payload = spec.get("payload")
    if payload is not None:
        payload = rmt.matrix_from_json(payload)
    try:
        return rmt.EnsembleSpec(
            kind=kind,
            n=spec.get("n"),
            entry_variance=spec.get("entry_variance"),
            payload=payload,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def validate(config: ExperimentConfig) -> None:
    if config.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {config.trials}")
    if not config.n_list:
        raise ConfigError("n_list must not be empty")
    if any(n < 1 for n in config.n_list):
        raise ConfigError("dimensions must be positive")
    if list(config.n_list) != sorted(set(config.n_list)):
        raise ConfigError("n_list must be strictly increasing")
    for name, spec in config.generators.items():
        _ensemble(name, spec)
        _generator_family(name, spec)

    if config.experiment == "spectrum":
        if config.model not in SPECTRUM_MODELS:
            raise ConfigError(
                f"unknown spectrum model {config.model!r}; choose from {SPECTRUM_MODELS}"
            )
        if config.model == "rotation-sum" and config.rotations < 1:
            raise ConfigError("rotation-sum needs rotations >= 1")
    elif config.experiment == "moments":
        words = [_parse_word(w) for w in (config.model or ())]
        if not words:
            raise ConfigError("moments experiment needs at least one word")
        for w in words:
            _validate_alternating(w, config)
    elif config.experiment == "decay":
        word = _parse_word(config.model or ())
        _validate_alternating(word, config)
        if len(config.n_list) < 4 or max(config.n_list) < 8 * min(config.n_list):
            raise ConfigError(
                "decay studies need at least 4 dimensions spanning a factor of 8"
            )
        if config.trials < 200:
            raise ConfigError("decay studies need at least 200 trials per dimension")
    elif config.experiment == "tau-prime":
        terms = _tau_prime_terms(config)
        for _, w in terms:
            if not any(_letter_family(x, config) == "a" for x in w):
                raise ConfigError(
                    "every tau-prime monomial must contain an a-family generator"
                )
            # b-runs must be pure powers of one realized generator; joint
            # moments of distinct b-matrices are not predictable here
            m = len(w)
            for i in range(m):
                x, y = w[i], w[(i + 1) % m]
                if (
                    _letter_family(x, config) == "b"
                    and _letter_family(y, config) == "b"
                    and (x.name, x.tag) != (y.name, y.tag)
                ):
                    raise ConfigError(
                        "adjacent b-family letters must share generator and rotation"
                    )
    else:
        raise ConfigError(f"unknown experiment {config.experiment!r}")


def _letter_family(letter: _WordLetter, config: ExperimentConfig) -> str:
    spec = config.generators.get(letter.name)
    if spec is None:
        raise ConfigError(f"word uses undeclared generator {letter.name!r}")
    return _generator_family(letter.name, spec)


def _validate_alternating(word: tuple[_WordLetter, ...], config: ExperimentConfig) -> None:
    families = [_letter_family(x, config) for x in word]
    if "a" not in families:
        raise ConfigError("every word must contain an a-family generator")
    m = len(word)
    for i in range(m):
        if families[i] == "b" and families[(i + 1) % m] == "b":
            raise ConfigError(
                "word is not alternating: two b-family letters are cyclically adjacent"
            )


def _tau_prime_terms(config: ExperimentConfig):
    terms = []
    for item in config.model or ():
        try:
            coeff_raw, letters = item
        except (TypeError, ValueError) as exc:
            raise ConfigError("tau-prime model terms must be [coeff, word] pairs") from exc
        if isinstance(coeff_raw, (list, tuple)):
            coeff = complex(coeff_raw[0], coeff_raw[1])
        else:
            coeff = complex(coeff_raw)
        terms.append((coeff, _parse_word(letters)))
    if not terms:
        raise ConfigError("tau-prime experiment needs at least one term")
    return terms


class _TrialContext:
    """Per-trial realized matrices: base samples plus rotation unitaries."""

    def __init__(self, config: ExperimentConfig, n: int, rng: np.random.Generator, tags):
        self.n = n
        self.rotations = {
            tag: rmt.sample_haar_unitary(n, rng) for tag in sorted(t for t in tags if t > 0)
        }
        self.base = {}
        for name in sorted(config.generators):
            mat = _ensemble(name, config.generators[name]).sample(n, rng)
            if mat.shape != (n, n):
                raise ConfigError(
                    f"generator {name!r} produced a {mat.shape} matrix at dimension {n}; "
                    f"fixed payloads must match every entry of n_list"
                )
            self.base[name] = mat
        self._rotated: dict[tuple[str, int], np.ndarray] = {}

    def realize(self, letter: _WordLetter) -> np.ndarray:
        key = (letter.name, letter.tag)
        mat = self._rotated.get(key)
        if mat is None:
            mat = self.base[letter.name]
            if letter.tag:
                u = self.rotations[letter.tag]
                mat = u @ mat @ u.conj().T
            self._rotated[key] = mat
        return mat.conj().T if letter.star else mat

    def trace_word(self, word: tuple[_WordLetter, ...]) -> complex:
        prod = self.realize(word[0])
        for letter in word[1:]:
            prod = prod @ self.realize(letter)
        return complex(np.trace(prod))


def _word_tags(words) -> set[int]:
    return {letter.tag for word in words for letter in word}


def _word_label(word: tuple[_WordLetter, ...]) -> str:
    parts = []
    for x in word:
        label = x.name + (f"@{x.tag}" if x.tag else "") + ("*" if x.star else "")
        parts.append(label)
    return " ".join(parts)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(len(values)))


def run_moment_table(config: ExperimentConfig) -> ResultRecord:
    """Empirical Tr(word) against the cyclic-monotone factorized product."""
    validate(config)
    if config.experiment != "moments":
        raise ConfigError("run_moment_table needs a 'moments' config")
    words = [_parse_word(w) for w in config.model]
    tags = _word_tags(words)
    started = time.perf_counter()

    per_n = []
    for n_index, n in enumerate(config.n_list):
        rows = [{"word": _word_label(w), "empirical": [], "factorized": []} for w in words]
        for trial in range(config.trials):
            rng = rmt.RngStream(config.seed).child(n_index, trial).generator()
            ctx = _TrialContext(config, n, rng, tags)
            for row, word in zip(rows, words):
                row["empirical"].append(ctx.trace_word(word))
                row["factorized"].append(_factorized_value(ctx, word, config))
        table = []
        for row in rows:
            emp = np.asarray(row["empirical"])
            fac = np.asarray(row["factorized"])
            diff = emp - fac
            emp_mean, emp_se = _mean_se(emp.real)
            fac_mean, fac_se = _mean_se(fac.real)
            diff_mean, diff_se = _mean_se(diff.real)
            table.append(
                {
                    "word": row["word"],
                    "empirical_mean": emp_mean,
                    "empirical_se": emp_se,
                    "factorized_mean": fac_mean,
                    "factorized_se": fac_se,
                    "diff_mean": diff_mean,
                    "diff_se": diff_se,
                    "abs_diff_of_means": abs(emp_mean - fac_mean),
                }
            )
        per_n.append({"n": n, "rows": table})

    return ResultRecord(
        experiment_id=f"moments-seed{config.seed}",
        config=config_to_json(config),
        per_n=per_n,
        fits=None,
        seed=config.seed,
        wall_clock_seconds=time.perf_counter() - started,
    )


def _factorized_value(ctx: _TrialContext, word, config: ExperimentConfig) -> complex:
    """Tr(product of a-letters, in cyclic order) times prod of tr(b-letters)."""
    a_prod = None
    value = complex(1.0)
    for letter in word:
        mat = ctx.realize(letter)
        if _letter_family(letter, config) == "a":
            a_prod = mat if a_prod is None else a_prod @ mat
        else:
            value *= complex(np.trace(mat)) / ctx.n
    return value * complex(np.trace(a_prod))


def _limit_b_stats(spec: dict) -> tuple[float, float]:
    kind = spec.get("kind")
    if kind == "wishart":
        return predict.wishart_limit_stats()
    if kind == "gue":
        return predict.gue_limit_stats()
    if kind == "fixed":
        payload = rmt.matrix_from_json(spec["payload"])
        n = payload.shape[0]
        return (
            float(np.trace(payload).real) / n,
            float(np.trace(payload @ payload).real) / n,
        )
    raise ConfigError(f"no limiting b-statistics known for kind {kind!r}")


def _a_side_matrix(config: ExperimentConfig, n: int) -> np.ndarray:
    specs = [
        (name, spec)
        for name, spec in sorted(config.generators.items())
        if _generator_family(name, spec) == "a"
    ]
    if len(specs) != 1:
        raise ConfigError("spectrum models need exactly one a-family generator")
    name, spec = specs[0]
    if spec.get("kind") == "dyadic_diag":
        return rmt.dyadic_diag(n)
    if spec.get("kind") == "fixed":
        return rmt.matrix_from_json(spec["payload"])
    raise ConfigError("the a-family generator must be dyadic_diag or fixed")


def _b_side_spec(config: ExperimentConfig) -> dict:
    specs = [
        spec
        for name, spec in sorted(config.generators.items())
        if _generator_family(name, spec) == "b"
    ]
    if len(specs) != 1:
        raise ConfigError("this spectrum model needs exactly one b-family generator")
    return specs[0]


def _rankwise_summary(spectra_list: list[Spectrum], top_m: int):
    pos = np.zeros((len(spectra_list), top_m))
    neg = np.zeros((len(spectra_list), top_m))
    for t, spec in enumerate(spectra_list):
        for i in range(top_m):
            pos[t, i] = spec.plus(i + 1)
            neg[t, i] = spec.minus(i + 1)
    ddof = 1 if len(spectra_list) > 1 else 0
    return (
        pos.mean(axis=0), pos.std(axis=0, ddof=ddof),
        neg.mean(axis=0), neg.std(axis=0, ddof=ddof),
    )


def run_spectrum_experiment(config: ExperimentConfig) -> ResultRecord:
    """
    Eigenvalues of a model polynomial against the predicted limiting
    spectrum, summarized rank by rank across trials.
    """
    validate(config)
    if config.experiment != "spectrum":
        raise ConfigError("run_spectrum_experiment needs a 'spectrum' config")
    if not config.generators:
        config = _with_default_generators(config)
        validate(config)
    started = time.perf_counter()
    model = config.model
    top_m = config.top_m

    per_n = []
    for n_index, n in enumerate(config.n_list):
        a_mat = _a_side_matrix(config, n)
        spec_a = rmt.hermitian_eigenvalues(a_mat)
        predicted, moment_scales = _spectrum_prediction(config, spec_a)

        trial_spectra = []
        trial_moments = []
        for trial in range(config.trials):
            rng = rmt.RngStream(config.seed).child(n_index, trial).generator()
            mat = _sample_spectrum_model(config, a_mat, n, rng)
            spec = rmt.hermitian_eigenvalues(mat)
            trial_spectra.append(spec)
            trial_moments.append(
                [float(np.trace(np.linalg.matrix_power(mat, j)).real) for j in moment_scales]
            )

        pos_mean, pos_sd, neg_mean, neg_sd = _rankwise_summary(trial_spectra, top_m)
        mean_spec = spectra.properly_arrange(list(pos_mean) + list(neg_mean))
        moment_rows = []
        for col, j in enumerate(moment_scales):
            emp = np.asarray([row[col] for row in trial_moments])
            emp_mean, emp_se = _mean_se(emp)
            moment_rows.append(
                {
                    "power": j,
                    "empirical_mean": emp_mean,
                    "empirical_se": emp_se,
                    "factorized": moment_scales[j] * spectra.moment(spec_a, j),
                }
            )
        per_n.append(
            {
                "n": n,
                "pos_mean": pos_mean.tolist(),
                "pos_sd": pos_sd.tolist(),
                "neg_mean": neg_mean.tolist(),
                "neg_sd": neg_sd.tolist(),
                "predicted_pos": [predicted.plus(i + 1) for i in range(top_m)],
                "predicted_neg": [predicted.minus(i + 1) for i in range(top_m)],
                "metric_d": spectra.metric_d(mean_spec, predicted),
                "moment_rows": moment_rows,
            }
        )

    return ResultRecord(
        experiment_id=f"spectrum-{model}-seed{config.seed}",
        config=config_to_json(config),
        per_n=per_n,
        fits=None,
        seed=config.seed,
        wall_clock_seconds=time.perf_counter() - started,
    )


def _with_default_generators(config: ExperimentConfig) -> ExperimentConfig:
    generators = {"A": {"kind": "dyadic_diag"}}
    if config.model in ("anticommutator", "commutator"):
        generators["B"] = {"kind": "wishart", "entry_variance": 2.0}
    out = ExperimentConfig(**{**asdict(config), "generators": generators})
    out.n_list = tuple(config.n_list)
    return out


def _spectrum_prediction(config: ExperimentConfig, spec_a: Spectrum):
    """Predicted spectrum plus the per-power factorized moment scale."""
    if config.model == "anticommutator":
        tau_b, tau_b2 = _limit_b_stats(_b_side_spec(config))
        predicted = predict.predict_anticommutator(spec_a, tau_b, tau_b2)
        root = math.sqrt(tau_b2)
        p, q = root + tau_b, -(root - tau_b)
        scales = {j: p ** j + q ** j for j in (1, 2, 3)}
        return predicted, scales
    if config.model == "commutator":
        tau_b, tau_b2 = _limit_b_stats(_b_side_spec(config))
        predicted = predict.predict_commutator(spec_a, tau_b, tau_b2)
        r = math.sqrt(tau_b2 - tau_b ** 2)
        scales = {j: 2.0 * r ** j for j in (2, 4, 6)}
        return predicted, scales
    # rotation-sum: the base copy plus `rotations` independently rotated copies
    k = config.rotations
    predicted = predict.predict_multi_unitary_disjoint([spec_a] * (k + 1), [1.0] * (k + 1))
    scales = {j: float(k + 1) for j in (1, 2, 3)}
    return predicted, scales


def _sample_spectrum_model(
    config: ExperimentConfig, a_mat: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    if config.model in ("anticommutator", "commutator"):
        u = rmt.sample_haar_unitary(n, rng)
        rotated = u @ a_mat @ u.conj().T
        b_mat = _ensemble("B", _b_side_spec(config)).sample(n, rng)
        if config.model == "anticommutator":
            return rotated @ b_mat + b_mat @ rotated
        return 1j * (rotated @ b_mat - b_mat @ rotated)
    total = np.array(a_mat, dtype=complex)
    for _ in range(config.rotations):
        u = rmt.sample_haar_unitary(n, rng)
        total += u @ a_mat @ u.conj().T
    return total


def _ols_loglog(ns, values):
    xs = np.log(np.asarray(ns, dtype=float))
    ys = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    dof = max(len(xs) - 2, 1)
    se = math.sqrt(float(resid @ resid) / dof / float(np.sum((xs - xs.mean()) ** 2)))
    return float(slope), float(se)


def run_decay_study(config: ExperimentConfig) -> ResultRecord:
    """Variance and fourth centered moment of Tr(word) vs dimension."""
    validate(config)
    if config.experiment != "decay":
        raise ConfigError("run_decay_study needs a 'decay' config")
    word = _parse_word(config.model)
    tags = _word_tags([word])
    started = time.perf_counter()

    per_n = []
    for n_index, n in enumerate(config.n_list):
        values = np.empty(config.trials, dtype=complex)
        for trial in range(config.trials):
            rng = rmt.RngStream(config.seed).child(n_index, trial).generator()
            ctx = _TrialContext(config, n, rng, tags)
            values[trial] = ctx.trace_word(word)
        centered = values - values.mean()
        abs2 = np.abs(centered) ** 2
        variance = float(abs2.sum() / max(len(values) - 1, 1))
        fourth = float(np.mean(abs2 ** 2))
        per_n.append({"n": n, "variance": variance, "fourth_central": fourth})

    fits: dict[str, object] = {}
    ns = [row["n"] for row in per_n]
    for key, label in (("variance", "variance"), ("fourth_central", "fourth")):
        vals = [row[key] for row in per_n]
        if all(v > 0 for v in vals):
            slope, se = _ols_loglog(ns, vals)
            fits[f"{label}_slope"] = slope
            fits[f"{label}_slope_se"] = se
            fits[f"{label}_slope_ci95"] = [slope - 2 * se, slope + 2 * se]
        else:
            fits[f"{label}_slope"] = None

    return ResultRecord(
        experiment_id=f"decay-seed{config.seed}",
        config=config_to_json(config),
        per_n=per_n,
        fits=fits,
        seed=config.seed,
        wall_clock_seconds=time.perf_counter() - started,
    )


def _tau_prime_prediction(config: ExperimentConfig, terms) -> complex:
    """Cyclic-monotone limit of the non-normalized trace of the polynomial."""
    total = complex(0.0)
    for coeff, word in terms:
        a_tags = {x.tag for x in word if _letter_family(x, config) == "a"}
        if len(a_tags) > 1:
            continue  # independently rotated a-factors: the trace vanishes
        total += coeff * _cyclic_monotone_limit(config, word)
    return total


def _cyclic_monotone_limit(config: ExperimentConfig, word) -> complex:
    a_names = sorted({x.name for x in word if _letter_family(x, config) == "a"})
    omega = _limit_a_functional(config, a_names)
    tau = _limit_b_functional(config)
    letters = []
    for x in word:
        if _letter_family(x, config) == "a":
            letters.append(ncms.Letter("a", a_names.index(x.name), x.star))
        else:
            letters.append(ncms.Letter("b", _b_index(config, x.name), x.star))
    return ncms.cyclic_monotone_moment(tuple(letters), omega, tau)


def _b_index(config: ExperimentConfig, name: str) -> int:
    names = sorted(
        n for n, s in config.generators.items() if _generator_family(n, s) == "b"
    )
    return names.index(name)


def _limit_a_functional(config: ExperimentConfig, a_names) -> ncms.MomentFunctional:
    kinds = {config.generators[name]["kind"] for name in a_names}
    if kinds == {"fixed"}:
        mats = [rmt.matrix_from_json(config.generators[name]["payload"]) for name in a_names]
        return ncms.MomentFunctional.from_matrices("a", mats)
    if kinds == {"dyadic_diag"} and len(a_names) == 1:
        return ncms.dyadic_weight()
    raise ConfigError(
        "tau-prime predictions support a single dyadic_diag a-generator "
        "or fixed-payload a-generators"
    )


def _limit_b_functional(config: ExperimentConfig) -> ncms.MomentFunctional:
    names = sorted(
        n for n, s in config.generators.items() if _generator_family(n, s) == "b"
    )
    moment_fns = []
    for name in names:
        kind = config.generators[name]["kind"]
        if kind == "wishart":
            moment_fns.append(ncms.marchenko_pastur_state())
        elif kind == "gue":
            moment_fns.append(ncms.semicircle_state())
        elif kind == "fixed":
            payload = rmt.matrix_from_json(config.generators[name]["payload"])
            moment_fns.append(ncms.MomentFunctional.from_matrices("b", [payload]))
        else:
            raise ConfigError(f"no limiting state known for b-generator kind {kind!r}")

    def fn(w: ncms.Word) -> complex:
        indices = {letter.index for letter in w}
        if len(indices) > 1:
            raise ConfigError(
                "a b-run mixes distinct generators; joint limiting moments "
                "are not available"
            )
        index = indices.pop()
        inner = tuple(ncms.Letter("b", 0, letter.star) for letter in w)
        return moment_fns[index](inner)

    return ncms.MomentFunctional("b", fn, generators=len(names))


def run_tau_prime_study(config: ExperimentConfig) -> ResultRecord:
    """n * tr_n(P) across dimensions against the cyclic-monotone limit."""
    validate(config)
    if config.experiment != "tau-prime":
        raise ConfigError("run_tau_prime_study needs a 'tau-prime' config")
    terms = _tau_prime_terms(config)
    tags = _word_tags([w for _, w in terms])
    prediction = _tau_prime_prediction(config, terms)
    started = time.perf_counter()

    per_n = []
    for n_index, n in enumerate(config.n_list):
        values = np.empty(config.trials, dtype=complex)
        for trial in range(config.trials):
            rng = rmt.RngStream(config.seed).child(n_index, trial).generator()
            ctx = _TrialContext(config, n, rng, tags)
            values[trial] = sum(c * ctx.trace_word(w) for c, w in terms)
        mean, se = _mean_se(values.real)
        per_n.append(
            {
                "n": n,
                "mean": mean,
                "se": se,
                "abs_error": abs(mean - prediction.real),
            }
        )

    return ResultRecord(
        experiment_id=f"tau-prime-seed{config.seed}",
        config=config_to_json(config),
        per_n=per_n,
        fits={"prediction": [prediction.real, prediction.imag]},
        seed=config.seed,
        wall_clock_seconds=time.perf_counter() - started,
    )


def run(config: ExperimentConfig) -> ResultRecord:
    runners = {
        "moments": run_moment_table,
        "spectrum": run_spectrum_experiment,
        "decay": run_decay_study,
        "tau-prime": run_tau_prime_study,
    }
    runner = runners.get(config.experiment)
    if runner is None:
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    return runner(config)


def selftest(verbose: bool = False) -> tuple[bool, list[str]]:
    """
    Exact-identity suites: the alternating binomial identity, the
    noncrossing block counts, and Weingarten biorthogonality.  Everything
    here is integer or rational arithmetic, no tolerances.
    """
    lines = []
    ok = True

    good = all(
        symgroup.lem1_lhs(n, m) == math.comb(n // 2, m)
        for n in range(0, 41)
        for m in range(0, n // 2 + 1)
    )
    ok &= good
    lines.append(f"alternating binomial identity, n <= 40: {'ok' if good else 'FAIL'}")

    good = True
    for n in range(1, 13):
        parts = symgroup.enumerate_nc121(n)
        for m in range(0, n // 2 + 1):
            if sum(1 for p in parts if p.pair_count == m) != math.comb(n, 2 * m):
                good = False
            for ell in range(0, n - 2 * m + 1):
                expected = symgroup.nc121_pair_singleton_count(n, m, ell)
                got = sum(
                    1
                    for p in parts
                    if p.pair_count == m and p.inner_singleton_count == ell
                )
                if got != expected:
                    good = False
    ok &= good
    lines.append(f"noncrossing 1/2-block counts, n <= 12: {'ok' if good else 'FAIL'}")

    good = True
    for k in range(1, 5):
        perms = symgroup.enumerate_permutations(k)
        for n in range(k, 7):
            table = weingarten.weingarten_table(k, n)
            for sigma in perms:
                total = Fraction(0)
                sigma_inv = symgroup.inverse(sigma)
                for tau in perms:
                    gram = n ** len(symgroup.cycles(symgroup.compose(sigma_inv, tau)))
                    total += gram * table[symgroup.cycle_type(tau)]
                if total != (1 if sigma == symgroup.identity(k) else 0):
                    good = False
    ok &= good
    lines.append(f"Weingarten biorthogonality, k <= 4, n <= 6: {'ok' if good else 'FAIL'}")

    good = True
    for n in range(2, 9):
        table = weingarten.weingarten_table(2, n)
        if table[(1, 1)] != Fraction(1, n * n - 1):
            good = False
        if table[(2,)] != Fraction(-1, n * (n * n - 1)):
            good = False
    ok &= good
    lines.append(f"degree-2 closed forms 1/(n^2-1), -1/(n(n^2-1)): {'ok' if good else 'FAIL'}")

    if verbose:
        for line in lines:
            print(line)
    return ok, lines
