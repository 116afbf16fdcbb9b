import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from railsem.kb import seed_schema  # noqa: E402
from railsem.pipeline import annotate_scene  # noqa: E402
from railsem.synth import GroundSpec, SceneObject, SceneSpec, reference_spec, write_scene  # noqa: E402


@pytest.fixture
def kb():
    return seed_schema()


def small_spec(objects, length=40.0, noise=0.0, seed=3):
    """A short ground strip carrying the given (cls, center_xy, dims) objects."""
    objs = [
        SceneObject(cls, (x, y, dims[2] / 2), dims, f"{cls.lower()}_{i}")
        for i, (cls, (x, y), dims) in enumerate(objects)
    ]
    return SceneSpec(length, objs, GroundSpec((0.0, length, -3.0, 3.0), 0.0, 20.0), 400.0, noise, seed)


@pytest.fixture
def scene_dir(tmp_path):
    """Factory writing a small synthetic scene directory and returning its path."""
    counter = [0]

    def make(objects, **kw):
        counter[0] += 1
        out = tmp_path / f"scene{counter[0]}"
        write_scene(small_spec(objects, **kw), out)
        return out

    return make


@pytest.fixture(scope="session")
def reference_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("reference")
    write_scene(reference_spec(), out)
    return out


@pytest.fixture(scope="session")
def reference_annotation(reference_dir):
    return annotate_scene(reference_dir)


ACCEPTANCE: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    """Log one acceptance verdict line and print it immediately."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
