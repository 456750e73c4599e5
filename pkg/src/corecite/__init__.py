"""Structural role of core sources in bibliographic coupling networks."""

__version__ = "0.1.0"

from .citenet import (
    CitationNetwork,
    CoreSet,
    DocumentRecord,
    MergeReport,
    Typology,
    core_from_ids,
    dedup_references,
    load_citations,
    select_core,
)
from .community import Partition, PartitionEnsemble, louvain, modularity, partition_ensemble
from .coupling import CouplingNetwork, SourceContribution, project_coupling, source_contribution
from .indicators import (
    IndicatorRecord,
    NullIndicatorSet,
    PartitionIndicators,
    RawIndicatorSet,
    ensemble_indicators,
    final_indicators,
    indicator_correlations,
    indicator_summary,
    modularity_within_indicator,
    null_indicator_table,
    null_indicators,
    raw_indicators,
    top_k,
)
from .nullmodel import ConfigurationSample, configuration_sample, null_ensemble
from .synth import PlantedCore, SynthResult, SynthSpec, generate
