"""Object/class algebra: objects with quantitative and qualitative properties,
universal operations that generate sets, multisets and classes, and
classification of objects against classes."""

from .algebra import (
    ClassCore,
    ClassificationError,
    DoesNotExist,
    DuplicateOperandError,
    HomogeneousClass,
    InhomogeneousClass,
    NoDifference,
    NoIntersection,
    NoSymmetricDifference,
    ObjectClass,
    ObjectCollection,
    Projection,
    class_methods,
    class_properties,
    classify,
    clone,
    difference,
    infer_class,
    intersection,
    is_homogeneous,
    is_multiset,
    symmetric_difference,
    union,
)
from .document import DocumentError, deserialize, serialize, structurally_equal
from .expr import (
    EvaluationError,
    UnboundNameError,
    VerificationExpression,
    canonical,
    eval_expression,
    evaluate_verification,
    parse_expression,
    render,
)
from .kb import Diagnostic, KnowledgeBase, ParseError, UnknownNameError
from .parser import parse_algebra, parse_document
from .properties import (
    MethodDescriptor,
    ObjectInstance,
    Property,
    QualitativeProperty,
    QuantitativeProperty,
    apply_method,
    dimension,
    method_equivalent,
    object_equal,
    objects_similar,
    property_equivalent,
    signatures_equivalent,
)

__version__ = "0.1.0"
