"""Motor estatístico: diferenças com IC, tamanhos de efeito, MBI e simulação de replicações."""
from .descriptive import Sample, SampleSummary, summarize, log_transform, back_transform_pct
from .effects import ComparisonConfig, ComparisonResult, cohens_d, compare_independent, compare_paired
from .mbi import (
    DescriptorLadder, MagnitudeScale, MbiConfig, MbiInference, Swc,
    classify_magnitude, infer, mbi_chances, qualitative_label,
)
from .simulate import DanceConfig, DanceResult, false_discovery_rate, run_dance, theoretical_power

__all__ = [
    'Sample', 'SampleSummary', 'summarize', 'log_transform', 'back_transform_pct',
    'ComparisonConfig', 'ComparisonResult', 'cohens_d', 'compare_independent', 'compare_paired',
    'DescriptorLadder', 'MagnitudeScale', 'MbiConfig', 'MbiInference', 'Swc',
    'classify_magnitude', 'infer', 'mbi_chances', 'qualitative_label',
    'DanceConfig', 'DanceResult', 'false_discovery_rate', 'run_dance', 'theoretical_power',
]
