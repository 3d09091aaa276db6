"""End-to-end pipeline: load, enhance, split, featurize, detect, evaluate.

The pipeline is configured from an INI file (see PipelineConfig.from_file)
and validated before any data is touched: a bad configuration raises
ConfigError up front. Failures inside a stage raise StageError naming the
stage, except plain I/O errors which pass through untouched.
"""

from __future__ import annotations

import configparser
import logging
import time
from pathlib import Path

from . import detectors, enhancers, features, loaders, masking
from .ngram import ngram_train
from .parsers import make_parser
from .tables import split_train_test, validate_event_table

logger = logging.getLogger("logbench.pipeline")

CHAIN_STEPS = ("normalize", "tokenize", "drain", "spell", "lenma",
               "ngram", "aggregate")
PARSER_STEPS = ("drain", "spell", "lenma")
DETECTOR_KINDS = ("lr", "dt", "kmeans", "iforest", "oov", "rarity")
FEATURE_SOURCES = ("words", "event_ids")


class ConfigError(Exception):
    """The pipeline configuration is invalid; nothing was run."""


class StageError(Exception):
    """A pipeline stage failed while running."""

    def __init__(self, stage: str, original: BaseException):
        super().__init__(f"stage {stage!r} failed: {original}")
        self.stage = stage
        self.original = original


class PipelineConfig:
    """Validated settings for one pipeline run."""

    def __init__(self, loader_spec: loaders.LoaderSpec, chain: list[str],
                 out_dir: Path, rules_path: Path | None = None,
                 parser_params: dict | None = None, ngram_n: int = 2,
                 ngram_p0: float = 0.05, feature_source: str = "words",
                 binary_features: bool = False, min_count: int = 1,
                 detector: str = "dt", detector_seed: int = 0,
                 contamination: float = 0.03, oov_threshold: float = 0.0,
                 split_fraction: float = 0.5, split_seed: int = 0,
                 save_tables: bool = False):
        self.loader_spec = loader_spec
        self.chain = list(chain)
        self.out_dir = Path(out_dir)
        self.rules_path = Path(rules_path) if rules_path else None
        self.parser_params = dict(parser_params or {})
        self.ngram_n = ngram_n
        self.ngram_p0 = ngram_p0
        self.feature_source = feature_source
        self.binary_features = binary_features
        self.min_count = min_count
        self.detector = detector
        self.detector_seed = detector_seed
        self.contamination = contamination
        self.oov_threshold = oov_threshold
        self.split_fraction = split_fraction
        self.split_seed = split_seed
        self.save_tables = save_tables
        self.validate()

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        unknown = [s for s in self.chain if s not in CHAIN_STEPS]
        if unknown:
            raise ConfigError(f"unknown chain steps: {unknown}")
        if len(self.chain) != len(set(self.chain)):
            raise ConfigError("chain steps may not repeat")
        parsers_in_chain = [s for s in self.chain if s in PARSER_STEPS]
        if len(parsers_in_chain) > 1:
            raise ConfigError("at most one parser may be in the chain")
        if "ngram" in self.chain:
            if not parsers_in_chain:
                raise ConfigError("ngram requires a parser in the chain")
            if "aggregate" not in self.chain:
                raise ConfigError("ngram requires aggregate in the chain")
        if self.feature_source not in FEATURE_SOURCES:
            raise ConfigError(
                f"feature source must be one of {FEATURE_SOURCES}")
        if self.feature_source == "event_ids" and not parsers_in_chain:
            raise ConfigError("event_ids features require a parser")
        if self.feature_source == "words" and "tokenize" not in self.chain:
            raise ConfigError("words features require tokenize in the chain")
        if self.detector not in DETECTOR_KINDS:
            raise ConfigError(
                f"detector must be one of {DETECTOR_KINDS}")
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split fraction must be in (0, 1)")
        if self.ngram_n < 2:
            raise ConfigError("ngram n must be at least 2")
        if not 0.0 <= self.contamination <= 1.0:
            raise ConfigError("contamination must be in [0, 1]")

    @property
    def parser_kind(self) -> str | None:
        for s in self.chain:
            if s in PARSER_STEPS:
                return s
        return None

    # -- parsing ----------------------------------------------------------

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            return cls._from_parser(parser)
        except (configparser.Error, ValueError, KeyError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    @classmethod
    def _from_parser(cls, cp: configparser.ConfigParser) -> "PipelineConfig":
        if not cp.has_section("loader"):
            raise ConfigError("missing [loader] section")
        fmt = cp.get("loader", "format", fallback=None)
        log = cp.get("loader", "log", fallback=None)
        if not fmt or not log:
            raise ConfigError("[loader] needs format and log")
        labels = cp.get("loader", "labels", fallback=None)
        try:
            spec = loaders.LoaderSpec(fmt, Path(log),
                                      Path(labels) if labels else None)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        chain_text = cp.get("enhance", "chain", fallback="")
        chain = [s.strip() for s in chain_text.replace(",", " ").split()
                 if s.strip()]
        parser_params: dict = {}
        for kind, keys in (("drain", ("depth", "sim_threshold",
                                      "max_children")),
                           ("spell", ("tau",)),
                           ("lenma", ("threshold",))):
            params = {}
            for key in keys:
                raw = cp.get("enhance", f"{kind}_{key}", fallback=None)
                if raw is not None:
                    params[key] = int(raw) if key in ("depth", "max_children") \
                        else float(raw)
            if params:
                parser_params[kind] = params

        return cls(
            loader_spec=spec,
            chain=chain,
            out_dir=Path(cp.get("output", "dir", fallback="out")),
            rules_path=cp.get("enhance", "rules", fallback=None),
            parser_params=parser_params,
            ngram_n=cp.getint("enhance", "ngram_n", fallback=2),
            ngram_p0=cp.getfloat("enhance", "ngram_p0", fallback=0.05),
            feature_source=cp.get("features", "source", fallback="words"),
            binary_features=cp.getboolean("features", "binary",
                                          fallback=False),
            min_count=cp.getint("features", "min_count", fallback=1),
            detector=cp.get("detect", "kind", fallback="dt"),
            detector_seed=cp.getint("detect", "seed", fallback=0),
            contamination=cp.getfloat("detect", "contamination",
                                      fallback=0.03),
            oov_threshold=cp.getfloat("detect", "oov_threshold",
                                      fallback=0.0),
            split_fraction=cp.getfloat("split", "fraction", fallback=0.5),
            split_seed=cp.getint("split", "seed", fallback=0),
            save_tables=cp.getboolean("output", "save_tables",
                                      fallback=False),
        )


def _stage(name: str, timings: dict):
    """Context manager: time a stage, wrap non-I/O failures in StageError."""
    class _Stage:
        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            timings[name] = (time.perf_counter() - self.start) * 1000.0
            if exc is None or isinstance(exc, (OSError, StageError)):
                return False
            raise StageError(name, exc) from exc
    return _Stage()


def run_pipeline(config: PipelineConfig) -> detectors.EvalReport:
    """Run the configured pipeline and write its artifacts.

    Writes report.json, report.csv and model.json into the output directory,
    plus templates.json when a parser ran, ngram_model.json when an ngram
    step ran, and the enhanced tables when save_tables is on. Returns the
    evaluation report.
    """
    config.validate()
    timings: dict[str, float] = {}
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)

    with _stage("load", timings):
        events, sequences = loaders.load(config.loader_spec)
        report = validate_event_table(events)
        if not report.is_valid:
            logger.warning("validation: %s", report.summary())

    rules = None
    if config.rules_path is not None:
        try:
            rules = masking.load_masking_rules(config.rules_path)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    store = None
    with _stage("enhance", timings):
        for step in config.chain:
            if step == "normalize":
                events = enhancers.add_normalized(events, rules)
            elif step == "tokenize":
                events = enhancers.add_tokens(events)
            elif step in PARSER_STEPS:
                parser = make_parser(step,
                                     **config.parser_params.get(step, {}))
                events = enhancers.add_event_ids(events, parser)
                store = parser.store
        if store is not None:
            store.save(out / "templates.json")

    seq_table = None
    with _stage("aggregate", timings):
        if "aggregate" in config.chain:
            seq_table = enhancers.aggregate_sequences(events, sequences)

    with _stage("split", timings):
        working = seq_table if seq_table is not None else events
        train, test = split_train_test(working, config.split_fraction,
                                       config.split_seed)
        if len(train) == 0 or len(test) == 0:
            raise ValueError("split produced an empty side; "
                             "not enough data to evaluate")

    if "ngram" in config.chain:
        with _stage("ngram", timings):
            model = ngram_train(train["event_ids"], n=config.ngram_n)
            model.save(out / "ngram_model.json")
            train = enhancers.add_ngram_scores(train, model, config.ngram_p0)
            test = enhancers.add_ngram_scores(test, model, config.ngram_p0)

    with _stage("features", timings):
        train_docs = _documents(train, config)
        test_docs = _documents(test, config)
        vocab = features.fit_vocabulary(train_docs,
                                        min_count=config.min_count)
        X_train = features.vectorize(train_docs, vocab,
                                     binary=config.binary_features)
        X_test = features.vectorize(test_docs, vocab,
                                    binary=config.binary_features)

    with _stage("train", timings):
        model, predictions, scores = _detect(
            config, train, test, train_docs, test_docs, X_train, X_test)
        detectors.save_model(model, out / "model.json")

    with _stage("evaluate", timings):
        if "label" not in test:
            raise ValueError(
                "evaluation needs labels; this loader provides none")
        truth = test["label"]
        eval_report = detectors.evaluate(predictions, truth, scores=scores,
                                         wall_clock_ms=timings)

    # the evaluate timing lands in `timings` only once its stage exits
    eval_report.wall_clock_ms = dict(timings)
    eval_report.save_json(out / "report.json")
    eval_report.save_csv(out / "report.csv")
    if config.save_tables:
        events.save(out / "events.table.json")
        events.write_csv(out / "events.csv")
        if seq_table is not None:
            seq_table.save(out / "sequences.table.json")
            seq_table.write_csv(out / "sequences.csv")
    logger.info("pipeline done: %r", eval_report)
    return eval_report


def _documents(table, config: PipelineConfig) -> list[list[str]]:
    if config.feature_source == "event_ids":
        if "event_ids" in table:
            return features.render_event_ids(table["event_ids"])
        return [[f"e{int(e)}"] for e in table["e_event_id"]]
    if "words" in table:
        return [list(w) for w in table["words"]]
    return [list(w) for w in table["e_words"]]


def _detect(config: PipelineConfig, train, test, train_docs, test_docs,
            X_train, X_test):
    kind = config.detector
    if kind in ("lr", "dt"):
        if "label" not in train:
            raise ValueError(
                f"detector {kind!r} is supervised and needs labels")
        model = detectors.train_supervised(X_train, train["label"], kind,
                                           seed=config.detector_seed)
        scores = model.score(X_test)
        return model, model.predict(X_test), scores
    if kind in ("kmeans", "iforest"):
        model = detectors.train_unsupervised(
            X_train, kind, seed=config.detector_seed,
            contamination=config.contamination)
        scores = model.score(X_test)
        return model, model.predict(X_test), scores
    if kind == "oov":
        model = detectors.OOVDetector(config.oov_threshold).fit(train_docs)
        scores = model.score(test_docs)
        return model, scores > config.oov_threshold, scores
    # rarity
    model = detectors.RarityDetector().fit(train_docs)
    scores = model.score(test_docs)
    return model, detectors.scores_to_labels(scores, config.contamination), \
        scores
