"""Entity profiles, feature vectors and feature matrices."""
from fraudlab.features.builders import FeatureBuilder, ProfileBuilder, profiles_from_store, profiles_to_docs
from fraudlab.features.featurize import FeatureVector, feature_values, featurize, select_feature_set
from fraudlab.features.matrix import (
    LABEL_CODES,
    MANIFEST_FILE,
    MATRIX_FILE,
    FeatureMatrix,
    export_matrix,
    labeled_downloads,
    matrix_from_rows,
)
from fraudlab.features.profiles import (
    AppProfile,
    DeviceProfile,
    EntityProfiles,
    IpProfile,
    PartialProfiles,
    aggregate,
    build_profiles,
    merge_partials,
    partition_by_entity,
)
from fraudlab.features.registry import (
    FEATURE_NAMES,
    FEATURE_REGISTRY_VERSION,
    FEATURE_SETS,
    FEATURES,
    Entity,
    FeatureSpec,
    Origin,
    feature_set_columns,
)

__all__ = [
    "FEATURES",
    "FEATURE_NAMES",
    "FEATURE_REGISTRY_VERSION",
    "FEATURE_SETS",
    "LABEL_CODES",
    "MANIFEST_FILE",
    "MATRIX_FILE",
    "AppProfile",
    "DeviceProfile",
    "Entity",
    "EntityProfiles",
    "FeatureBuilder",
    "FeatureMatrix",
    "FeatureSpec",
    "FeatureVector",
    "IpProfile",
    "Origin",
    "PartialProfiles",
    "ProfileBuilder",
    "aggregate",
    "build_profiles",
    "export_matrix",
    "feature_set_columns",
    "feature_values",
    "featurize",
    "labeled_downloads",
    "matrix_from_rows",
    "merge_partials",
    "partition_by_entity",
    "profiles_from_store",
    "profiles_to_docs",
    "select_feature_set",
]
