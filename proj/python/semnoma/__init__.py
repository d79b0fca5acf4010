"""Semantic NOMA image-transmission simulator: python surface of the C++ core."""

from semnoma._core import (  # noqa: F401
    CatalogLayout,
    CatalogSet,
    ConfigError,
    Env,
    ExperimentSetup,
    IoError,
    NetworkScenario,
    NumericalError,
    Scheme,
    ShapeError,
    SurrogateParams,
    VersionError,
    brute_force_order,
    catalog_importance,
    dbm_to_watts,
    dbmhz_to_whz,
    evaluate,
    load_catalog_set,
    load_scenario,
    metric_weighted_ll,
    plateau_episode,
    rates_for_order,
    rayleigh_quotient,
    sample_rayleigh_scenario,
    save_catalog_set,
    save_scenario,
    sca_decoding,
    surrogate_lpips,
    synthesize_catalog_set,
    system_latency,
    template_setup,
    train,
    watts_to_dbm,
    worst_case_beamformers,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
