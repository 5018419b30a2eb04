"""Self-describing checkpoint archives.

Every checkpoint carries a JSON-serializable header (format version, kind,
model/training config, lineage metadata) next to the weights, so the CLI
and service can load a file without sidecar configs.
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import torch

FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


@dataclass
class Checkpoint:
    kind: str  # e.g. "qa-desk", "qg-desk", "qa-stub", "qg-stub"
    config: Dict[str, Any]
    state: Optional[Dict[str, Any]] = None
    meta: Dict[str, Any] = field(default_factory=dict)
    version: int = FORMAT_VERSION


def save_checkpoint(path: str, ckpt: Checkpoint) -> None:
    header = {"version": ckpt.version, "kind": ckpt.kind,
              "config": ckpt.config, "meta": ckpt.meta}
    json.dumps(header)  # must stay JSON-serializable
    torch.save({"header": header, "state": ckpt.state}, path)


def load_checkpoint(path: str) -> Checkpoint:
    try:
        blob = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    if "header" not in blob:
        raise CheckpointError(f"{path} is not a qnakit checkpoint")
    h = blob["header"]
    if h.get("version", 0) > FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {h.get('version')}")
    return Checkpoint(h["kind"], h["config"], blob.get("state"), h.get("meta", {}), h["version"])


def load_model(path: str):
    """Instantiate the model object a checkpoint describes (dispatch on kind)."""
    ckpt = load_checkpoint(path)
    if ckpt.kind == "qa-desk":
        from .qa.train import qa_model_from_checkpoint

        return qa_model_from_checkpoint(ckpt)
    if ckpt.kind == "qg-desk":
        from .qg.train import qg_model_from_checkpoint

        return qg_model_from_checkpoint(ckpt)
    if ckpt.kind == "qa-stub":
        from .qa.stub import StubQAModel

        return StubQAModel.from_checkpoint(ckpt)
    if ckpt.kind == "qg-stub":
        from .qg.stub import StubQGModel

        return StubQGModel.from_checkpoint(ckpt)
    raise CheckpointError(f"unknown checkpoint kind: {ckpt.kind}")
