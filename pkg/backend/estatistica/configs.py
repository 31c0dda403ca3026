from dataclasses import dataclass, asdict, fields, replace
from pathlib import Path
import os
import json
import logging
from dotenv import load_dotenv, dotenv_values

from .effects import ComparisonConfig, VARIANCE_MODELS, STANDARDIZERS
from .exceptions import ConfigError
from .mbi import DescriptorLadder, MagnitudeScale, MbiConfig, INFERENCE_MODES, LOCALES
from .simulate import DanceConfig

load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = 'MBI_'


def _parse_bool(value: str) -> bool:
    lowered = str(value).strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off', ''):
        return False
    raise ConfigError(f'expected a boolean, got {value!r}')


def _parse_floats(value) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(float(v) for v in str(value).replace(';', ',').split(',') if v.strip())


@dataclass
class RunConfig:
    """
    Resolved options of one command-line run: the union of the module configs.

    Attributes:
        ci_level (float): Confidence level of every interval. Defaults to 0.90.
        swc (float): Smallest worthwhile change, standardized units. Defaults to 0.20.
        swc_raw (float | None): Smallest worthwhile change in raw units; replaces swc,
            converted per comparison through its standardizer.
        variance_model (str): 'welch' (default) or 'pooled'.
        log_scale (bool): Analyse natural logs and report percent effects.
        standardizer (str): Paired effect-size denominator ('baseline-sd' or 'diff-sd').
        hedges_correction (bool): Small-sample correction of d.
        scale_thresholds (tuple): Magnitude band limits. Defaults to (0.2, 0.6, 1.2, 2.0).
        ladder (str): Descriptor ladder preset, 'figure' (default) or 'progressive'.
        ladder_thresholds (tuple | None): Overrides the preset's rung limits.
        mode (str): 'mechanistic' (default) or 'clinical'.
        unclear_thresholds (tuple): (positive, negative) limits of the mechanistic rule.
        benefit_threshold (float): Clinical benefit limit. Defaults to 0.25.
        harm_threshold (float): Clinical harm limit. Defaults to 0.005.
        locale (str): 'en' (default) or 'pt' display text.
        seed (int | None): Simulation seed; required by the simulator.
        workers (int): Simulation worker threads.
        n_experiments (int): Simulated replications. Defaults to 25.
        n_per_group (int): Simulated sample size per group. Defaults to 20.
        sigma (float): Simulated population SD. Defaults to 20.
        delta_mu (float): Simulated difference of population means. Defaults to 10.
        alpha (float): Significance level of the simulation summary. Defaults to 0.05.
    """

    ci_level: float = 0.90
    swc: float = 0.20
    swc_raw: float | None = None
    variance_model: str = 'welch'
    log_scale: bool = False
    standardizer: str = 'baseline-sd'
    hedges_correction: bool = False
    scale_thresholds: tuple = (0.2, 0.6, 1.2, 2.0)
    ladder: str = 'figure'
    ladder_thresholds: tuple | None = None
    mode: str = 'mechanistic'
    unclear_thresholds: tuple = (0.05, 0.05)
    benefit_threshold: float = 0.25
    harm_threshold: float = 0.005
    locale: str = 'en'
    seed: int | None = None
    workers: int = 1
    n_experiments: int = 25
    n_per_group: int = 20
    sigma: float = 20.0
    delta_mu: float = 10.0
    alpha: float = 0.05

    def validate(self) -> 'RunConfig':
        """Build every module config once so invalid values fail before any analysis."""
        if self.variance_model not in VARIANCE_MODELS:
            raise ConfigError(f'variance must be one of {", ".join(VARIANCE_MODELS)}, got {self.variance_model!r}')
        if self.standardizer not in STANDARDIZERS:
            raise ConfigError(f'standardizer must be one of {", ".join(STANDARDIZERS)}, got {self.standardizer!r}')
        if self.mode not in INFERENCE_MODES:
            raise ConfigError(f'mode must be one of {", ".join(INFERENCE_MODES)}, got {self.mode!r}')
        if self.locale not in LOCALES:
            raise ConfigError(f'locale must be one of {", ".join(LOCALES)}, got {self.locale!r}')
        if self.seed is not None and not (0 <= self.seed < 2 ** 64):
            raise ConfigError(f'seed must be a 64-bit unsigned integer, got {self.seed!r}')
        if self.workers < 1:
            raise ConfigError(f'workers must be >= 1, got {self.workers!r}')
        self.comparison_config()
        self.mbi_config()
        if self.seed is not None:
            self.dance_config()
        return self

    def comparison_config(self) -> ComparisonConfig:
        return ComparisonConfig(
            ci_level=self.ci_level,
            variance_model=self.variance_model,
            use_log_scale=self.log_scale,
            standardizer=self.standardizer,
            hedges_correction=self.hedges_correction,
        )

    def descriptor_ladder(self) -> DescriptorLadder:
        ladder = DescriptorLadder.preset(self.ladder)
        if self.ladder_thresholds:
            ladder = replace(ladder, thresholds=tuple(self.ladder_thresholds))
        return ladder

    def mbi_config(self) -> MbiConfig:
        return MbiConfig(
            swc=self.swc,
            swc_raw=self.swc_raw,
            scale=MagnitudeScale(thresholds=tuple(self.scale_thresholds)),
            ladder=self.descriptor_ladder(),
            mode=self.mode,
            unclear_thresholds=tuple(self.unclear_thresholds),
            benefit_threshold=self.benefit_threshold,
            harm_threshold=self.harm_threshold,
            locale=self.locale,
        )

    def dance_config(self) -> DanceConfig:
        return DanceConfig(
            n_experiments=self.n_experiments,
            n_per_group=self.n_per_group,
            sigma=self.sigma,
            delta_mu=self.delta_mu,
            alpha=self.alpha,
            ci_level=self.ci_level,
            seed=self.seed,
            variance_model=self.variance_model,
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ('scale_thresholds', 'unclear_thresholds', 'ladder_thresholds'):
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


_CONVERTERS = {
    'ci_level': float,
    'swc': float,
    'swc_raw': float,
    'variance_model': str,
    'log_scale': _parse_bool,
    'standardizer': str,
    'hedges_correction': _parse_bool,
    'scale_thresholds': _parse_floats,
    'ladder': str,
    'ladder_thresholds': _parse_floats,
    'mode': str,
    'unclear_thresholds': _parse_floats,
    'benefit_threshold': float,
    'harm_threshold': float,
    'locale': str,
    'seed': int,
    'workers': int,
    'n_experiments': int,
    'n_per_group': int,
    'sigma': float,
    'delta_mu': float,
    'alpha': float,
}

# Flag spellings accepted in config files and environment variables.
_ALIASES = {
    'ci': 'ci_level',
    'variance': 'variance_model',
    'log': 'log_scale',
    'scale': 'scale_thresholds',
    'hedges': 'hedges_correction',
    'experiments': 'n_experiments',
    'n': 'n_per_group',
    'delta': 'delta_mu',
}


class ConfigManager:
    """
    Loads RunConfig values from the environment, key-value files and flags.

    Precedence, lowest first: dataclass defaults, MBI_* environment
    variables, the --config file, command-line flags.

    Static Methods
    --------------
    load_from_env() -> dict
        Overrides found in MBI_* environment variables (after load_dotenv()).
    load_from_file(settings_path) -> dict
        Overrides found in a KEY=value file, read with dotenv_values.
    resolve(settings_path, flags) -> RunConfig
        Merges every layer and validates the result.
    """

    @staticmethod
    def _normalize(raw: dict, origin: str) -> dict:
        overrides = {}
        known = {f.name for f in fields(RunConfig)}
        for key, value in raw.items():
            name = key.lower()
            if name.startswith(ENV_PREFIX.lower()):
                name = name[len(ENV_PREFIX):]
            name = name.replace('-', '_')
            name = _ALIASES.get(name, name)
            if name not in known:
                raise ConfigError(f'unknown option {key!r} in {origin}')
            if value is None:
                continue
            try:
                overrides[name] = _CONVERTERS[name](value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f'invalid value for {key!r} in {origin}: {e}') from e
        return overrides

    @staticmethod
    def load_from_env() -> dict:
        """
        Reads MBI_* environment variables, e.g. MBI_CI_LEVEL=0.95 or MBI_LOCALE=pt.

        Returns:
            dict: RunConfig field overrides.
        """
        raw = {k: v for k, v in os.environ.items() if k.startswith(ENV_PREFIX)}
        return ConfigManager._normalize(raw, 'environment')

    @staticmethod
    def load_from_file(settings_path: str) -> dict:
        """
        Reads a key-value file mirroring the command-line flags, e.g.

            CI=0.95
            SWC=0.2
            VARIANCE=pooled

        Args:
            settings_path (str): Path to the file.

        Returns:
            dict: RunConfig field overrides.

        Raises:
            ConfigError: Missing file or unknown key.
        """
        settings_file = Path(settings_path)
        if not settings_file.exists():
            raise ConfigError(f'config file not found: {settings_path}')
        values = dotenv_values(settings_file)
        logger.info(f'Configuração carregada de {settings_file}')
        return ConfigManager._normalize(dict(values), str(settings_file))

    @staticmethod
    def resolve(
        settings_path: str | None = None,
        flags: dict | None = None,
        defaults: dict | None = None,
    ) -> RunConfig:
        """
        Merges defaults, environment, config file and flags, then validates.

        Args:
            settings_path (str | None): Optional key-value config file.
            flags (dict | None): Command-line values; None entries are ignored.
            defaults (dict | None): Command-specific defaults, below every other layer.

        Returns:
            RunConfig: The validated configuration.
        """
        merged = ConfigManager._normalize(defaults or {}, 'defaults')
        merged.update(ConfigManager.load_from_env())
        if settings_path:
            merged.update(ConfigManager.load_from_file(settings_path))
        if flags:
            merged.update(ConfigManager._normalize(
                {k: v for k, v in flags.items() if v is not None}, 'command line'
            ))
        try:
            config = RunConfig(**merged)
        except TypeError as e:
            raise ConfigError(str(e)) from e
        return config.validate()
