from .features import (
    BINNED_LEVELS,
    LABEL_BINARY,
    LABEL_BINNED,
    RosterSnapshot,
    V4_BINARY,
    V5_TAGGED,
    encode_features,
    encode_features_for_student,
    encode_label,
    snap_to_level,
)
from .forest import DecisionTree, RandomForestClassifier, best_split
from .linear import LogisticRegressionClassifier
from .mlp import MLPClassifier
from .registry import (
    MODEL_FOREST,
    MODEL_LOGREG,
    MODEL_MLP,
    ClassModel,
    ModelConfig,
    Recommendation,
    RecsysService,
    recommend_top_n,
    train_class_model,
)
from .similarity import student_interest_tags, tag_similarity

__all__ = [
    "BINNED_LEVELS",
    "LABEL_BINARY",
    "LABEL_BINNED",
    "MODEL_FOREST",
    "MODEL_LOGREG",
    "MODEL_MLP",
    "ClassModel",
    "DecisionTree",
    "LogisticRegressionClassifier",
    "MLPClassifier",
    "ModelConfig",
    "RandomForestClassifier",
    "Recommendation",
    "RecsysService",
    "RosterSnapshot",
    "V4_BINARY",
    "V5_TAGGED",
    "best_split",
    "encode_features",
    "encode_features_for_student",
    "encode_label",
    "recommend_top_n",
    "snap_to_level",
    "student_interest_tags",
    "tag_similarity",
    "train_class_model",
]
