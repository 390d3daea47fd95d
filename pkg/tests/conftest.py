import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

# Mean colour per synthetic class; noise makes the classes overlap a little.
CLASS_COLOURS = {
    "blackspot": (70, 50, 40),
    "canker": (150, 120, 50),
    "fresh": (230, 150, 30),
    "greening": (120, 160, 70),
}


def make_dataset(root: Path, per_class: int, seed: int = 0, size=(48, 64), noise: float = 40.0) -> Path:
    rng = np.random.default_rng(seed)
    for name, colour in CLASS_COLOURS.items():
        d = root / name
        d.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            px = np.clip(rng.normal(colour, noise, (*size, 3)), 0, 255).astype(np.uint8)
            Image.fromarray(px).save(d / f"{name}_{i:03d}.png")
    return root


@pytest.fixture
def synth_dataset(tmp_path):
    """4 classes x 10 images."""
    return make_dataset(tmp_path / "data", 10)


@pytest.fixture(scope="session")
def synth_dataset_80(tmp_path_factory):
    """4 classes x 20 images."""
    return make_dataset(tmp_path_factory.mktemp("synth80") / "data", 20, seed=1)


def make_conv_model(path: Path, channels: int = 2, seed: int = 0) -> Path:
    """Tiny ONNX graph: 32x32/stride-32 conv + ReLU, so 224x224 -> ``channels`` x 7 x 7."""
    import onnx
    from onnx import TensorProto, helper, numpy_helper

    rng = np.random.default_rng(seed)
    w = rng.normal(0, 0.05, (channels, 3, 32, 32)).astype(np.float32)
    b = rng.normal(0, 0.1, channels).astype(np.float32)
    graph = helper.make_graph(
        [
            helper.make_node("Conv", ["input", "w", "b"], ["conv"], kernel_shape=[32, 32], strides=[32, 32]),
            helper.make_node("Relu", ["conv"], ["features"]),
        ],
        "tiny_trunk",
        [helper.make_tensor_value_info("input", TensorProto.FLOAT, ["batch", 3, 224, 224])],
        [helper.make_tensor_value_info("features", TensorProto.FLOAT, ["batch", channels, 7, 7])],
        initializer=[numpy_helper.from_array(w, "w"), numpy_helper.from_array(b, "b")],
    )
    model = helper.make_model(graph, opset_imports=[helper.make_opsetid("", 13)])
    model.ir_version = 8
    onnx.checker.check_model(model)
    onnx.save(model, str(path))
    return path


def write_manifest(path: Path, **overrides) -> Path:
    manifest = {
        "kind": "resnet50",
        "input_name": "input",
        "output_name": "features",
        "preprocessing": "unit_scale_torch",
        "channel_order_expected": "rgb",
        "tap": "flatten_last_conv",
        "output_dim": 98,
    }
    manifest.update(overrides)
    path.write_text(json.dumps(manifest))
    return path


@pytest.fixture
def tiny_model(tmp_path):
    """(manifest path, model path) for a 2-channel 7x7 trunk posing as resnet50."""
    pytest.importorskip("onnxruntime")
    pytest.importorskip("onnx")
    model = make_conv_model(tmp_path / "tiny.onnx")
    return write_manifest(tmp_path / "tiny.json", model_path="tiny.onnx"), model


# --- acceptance reporting ---------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion.

    Call ``criterion(n, text, ok)``; the verdict is printed in the terminal
    summary and a failing verdict fails the test.
    """

    def record(n: int, text: str, ok: bool):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")
        assert ok, text

    yield record


def pytest_runtest_logreport(report):
    if report.when == "setup" and report.skipped and "test_acceptance" in report.nodeid:
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        ACCEPTANCE_LINES.append(f"[SKIP] {report.nodeid.split('::')[-1]}: {reason}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
