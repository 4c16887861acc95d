from .fmt import ParseError, parse_instance, serialise_instance
from .itc2007 import AdaptationPolicy, CTTFormatError, PolicyError, adapt_itc2007, parse_ctt
from .ops import curricula_order, generate_subdivision, ordered_sort, two_campus_room_scaling, random_sort
from .types import (
    BOTH,
    CalendarGeometry,
    CampusLayout,
    Curriculum,
    Instance,
    InstanceError,
    Lecture,
    Professor,
    validate,
)

__all__ = [
    "AdaptationPolicy", "BOTH", "CTTFormatError", "CalendarGeometry", "CampusLayout", "Curriculum",
    "Instance", "InstanceError", "Lecture", "ParseError", "PolicyError", "Professor",
    "adapt_itc2007", "curricula_order", "generate_subdivision", "ordered_sort", "two_campus_room_scaling",
    "parse_ctt", "parse_instance", "random_sort", "serialise_instance", "validate",
]
