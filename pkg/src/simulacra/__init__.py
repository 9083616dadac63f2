"""Generative social simulation: populate a community design with synthetic behavior."""

from .model import (
    CommunityDesign,
    GenerationConfig,
    Persona,
    Rule,
    Thread,
    Universe,
    Utterance,
    validate_design,
)
from .gateway import AuditLog, BackendConfig, LiveBackend, MockBackend
from .engine import generate_thread, generate_universe
from .scenario import WhatIfSpec, multiverse_community, multiverse_thread, whatif_intervention, whatif_reply
from .store import Store

__all__ = [
    "AuditLog",
    "BackendConfig",
    "CommunityDesign",
    "GenerationConfig",
    "LiveBackend",
    "MockBackend",
    "Persona",
    "Rule",
    "Store",
    "Thread",
    "Universe",
    "Utterance",
    "WhatIfSpec",
    "generate_thread",
    "generate_universe",
    "multiverse_community",
    "multiverse_thread",
    "validate_design",
    "whatif_intervention",
    "whatif_reply",
]
