"""Batch command-line interface.

Exit codes: 0 success, 2 validation problem, 3 backend problem.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .engine import generate_universe
from .errors import (
    BackendConfigError,
    BackendUnavailableError,
    DesignValidationError,
    SimulacraError,
)
from .gateway import AuditLog, backend_from_env
from .model import (
    CommunityDesign,
    GenerationConfig,
    Thread,
    Universe,
    canonical_json,
    validate_design,
)
from .personas import expand_personas
from .rng import RngStream
from .scenario import WhatIfSpec, whatif_intervention, whatif_reply

EXIT_VALIDATION = 2
EXIT_BACKEND = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_design(path: str) -> CommunityDesign:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        _fail(EXIT_VALIDATION, f"cannot read design file {path}: {exc}")
    violations = validate_design(data)
    if violations:
        _fail(EXIT_VALIDATION, "invalid design: " + "; ".join(violations))
    return CommunityDesign.from_dict(data)


def _load_universe(path: str) -> Universe:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return Universe.from_dict(data)
    except (OSError, ValueError, KeyError, DesignValidationError) as exc:
        _fail(EXIT_VALIDATION, f"cannot read universe file {path}: {exc}")


def _backend(kind: str):
    try:
        return backend_from_env(AuditLog(), kind=kind)
    except BackendConfigError as exc:
        _fail(EXIT_BACKEND, str(exc))


def transcript(thread: Thread) -> str:
    """Human-readable "[Name]: text" rendering of one thread."""
    return "\n".join(f"[{u.author}]: {u.text}" for u in thread.utterances) + "\n"


@click.group()
def main():
    """Generate and probe synthetic community behavior."""


@main.command()
@click.option("--design", "design_path", required=True, type=click.Path(exists=True))
@click.option("--ablation", type=click.Choice(["full", "no-description", "no-personas"]),
              default="full")
@click.option("--seed", type=int, default=None)
@click.option("--threads", "thread_count", type=int, default=None)
@click.option("--personas", "pool_size", type=int, default=None,
              help="Persona pool size (smaller is faster).")
@click.option("--backend", "backend_kind", type=click.Choice(["live", "mock"]), default="mock")
@click.option("--out", "out_dir", required=True, type=click.Path())
def generate(design_path, ablation, seed, thread_count, pool_size, backend_kind, out_dir):
    """Generate a universe from a design file and write it with transcripts."""
    design = _load_design(design_path)
    overrides = {"ablation": ablation.replace("-", "_")}
    if seed is not None:
        overrides["rng_seed"] = seed
    if thread_count is not None:
        overrides["thread_count"] = thread_count
    if pool_size is not None:
        overrides["persona_pool_size"] = pool_size
    try:
        config = GenerationConfig(**overrides)
    except DesignValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    backend = _backend(backend_kind)

    try:
        universe = generate_universe(design, config, backend)
    except (BackendUnavailableError, BackendConfigError) as exc:
        _fail(EXIT_BACKEND, str(exc))
    except SimulacraError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "universe.json").write_text(canonical_json(universe.to_dict()), encoding="utf-8")
    transcripts = out / "transcripts"
    transcripts.mkdir(exist_ok=True)
    for i, thread in enumerate(universe.threads):
        (transcripts / f"thread-{i:03d}.txt").write_text(transcript(thread), encoding="utf-8")
    click.echo(f"universe {universe.id}: {len(universe.threads)} threads, "
               f"{len(universe.roster)} personas -> {out}")


@main.command()
@click.option("--design", "design_path", required=True, type=click.Path(exists=True))
@click.option("--count", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--backend", "backend_kind", type=click.Choice(["live", "mock"]), default="mock")
def personas(design_path, count, seed, backend_kind):
    """Expand the design's seed personas and print the roster."""
    design = _load_design(design_path)
    config = GenerationConfig(rng_seed=seed,
                              persona_pool_size=max(count, len(design.seed_personas)))
    backend = _backend(backend_kind)
    try:
        roster = expand_personas(design.seed_personas, config.persona_pool_size,
                                 backend, config)
    except (BackendUnavailableError, BackendConfigError) as exc:
        _fail(EXIT_BACKEND, str(exc))
    except SimulacraError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    for p in roster:
        click.echo(f"{p.name}, {p.description}")


@main.command()
@click.option("--universe", "universe_path", required=True, type=click.Path(exists=True))
@click.option("--thread", "thread_id", required=True)
@click.option("--at", "at_index", type=int, required=True)
@click.option("--persona", "persona_spec", default=None,
              help='Injected persona as "Label:blurb", e.g. "Troll:shares trolling comments".')
@click.option("--intervene", "intervention_text", default=None)
@click.option("-k", "alternatives", type=int, default=3)
@click.option("--backend", "backend_kind", type=click.Choice(["live", "mock"]), default="mock")
def whatif(universe_path, thread_id, at_index, persona_spec, intervention_text,
           alternatives, backend_kind):
    """Regenerate a thread from an utterance with an injected persona or intervention."""
    universe = _load_universe(universe_path)
    backend = _backend(backend_kind)
    injected_name = injected_description = ""
    if persona_spec:
        injected_name, _, injected_description = persona_spec.partition(":")
        if not injected_name.strip() or not injected_description.strip():
            _fail(EXIT_VALIDATION, f'--persona must look like "Label:blurb": {persona_spec!r}')
    spec_kwargs = dict(
        thread_id=thread_id,
        at_utterance_index=at_index,
        injected_name=injected_name.strip(),
        injected_description=injected_description.strip(),
        intervention_text=intervention_text,
        alternatives=alternatives,
    )
    try:
        spec = WhatIfSpec(**spec_kwargs)
        if intervention_text:
            branches = whatif_intervention(universe, spec, backend)
        else:
            branches = whatif_reply(universe, spec, backend)
    except (BackendUnavailableError, BackendConfigError) as exc:
        _fail(EXIT_BACKEND, str(exc))
    except SimulacraError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    for branch in branches:
        click.echo(f"--- alternative {branch.branch_index} ({branch.thread.id}) ---")
        click.echo(transcript(branch.thread), nl=False)


@main.command("export-pairs")
@click.option("--universe", "universe_path", required=True, type=click.Path(exists=True))
@click.option("--real", "real_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=0)
def export_pairs(universe_path, real_dir, out_path, seed):
    """Pair generated threads with real transcripts for discrimination studies."""
    universe = _load_universe(universe_path)
    real_files = sorted(Path(real_dir).glob("*.txt"))
    if not real_files:
        _fail(EXIT_VALIDATION, f"no .txt transcripts in {real_dir}")
    generated = [transcript(t) for t in universe.threads]
    real = [p.read_text(encoding="utf-8") for p in real_files]
    n = min(len(real), len(generated))
    if n == 0:
        _fail(EXIT_VALIDATION, "universe has no threads to pair")

    rng = RngStream(seed)
    rng.shuffle(real)
    rng.shuffle(generated)
    pairs = []
    for i in range(n):
        real_on_left = rng.uniform() < 0.5
        left, right = (real[i], generated[i]) if real_on_left else (generated[i], real[i])
        pairs.append({"left": left, "right": right,
                      "real_side": "left" if real_on_left else "right"})
    Path(out_path).write_text(canonical_json({"pairs": pairs}), encoding="utf-8")
    click.echo(f"wrote {n} pairs to {out_path}")


@main.command()
@click.option("--port", type=int, default=None)
def serve(port):
    """Run the HTTP API (honors SIMULACRA_* environment variables)."""
    import os
    import uvicorn
    from .service import ENV_PORT, create_app
    if port is None:
        port = int(os.environ.get(ENV_PORT, "8080"))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
