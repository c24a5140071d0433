import numpy as np
import pytest

from chartgen.annotate import annotate
from chartgen.corpus import bundled_table_dir
from chartgen.errors import RenderError, SynthesisError
from chartgen.layout import layout
from chartgen.synth import make_chart_spec
from chartgen.tables import impute_table, load_table


def load_dir_tables(kind: str) -> list:
    out = []
    for path in sorted(bundled_table_dir(kind).glob("*.csv")):
        out.append(load_table(path.read_bytes(), name=path.stem))
    return out


@pytest.fixture(scope="session")
def train_tables():
    return load_dir_tables("train")


@pytest.fixture(scope="session")
def novel_tables():
    return load_dir_tables("novel")


@pytest.fixture(scope="session")
def _chart_cache():
    return {}


@pytest.fixture
def make_chart(train_tables, _chart_cache):
    """(chart_type, seed) -> (spec, scene, annotations), session-cached.

    Draws tables from the bundled pool the same way the corpus builder
    does, so every requested (type, seed) yields a renderable chart.
    """

    def build(chart_type: str, seed: int):
        key = (chart_type, seed)
        if key not in _chart_cache:
            tables = build.tables
            rng = np.random.default_rng(seed)
            last = None
            for _ in range(20):
                table = tables[int(rng.integers(len(tables)))]
                try:
                    spec = make_chart_spec(impute_table(table, rng),
                                           chart_type, rng)
                    scene = layout(spec)
                    break
                except (SynthesisError, RenderError) as exc:
                    last = exc
            else:
                raise AssertionError(f"no renderable chart for {key}: {last}")
            ann = annotate(scene, chart_id=f"{chart_type}-{seed}")
            _chart_cache[key] = (spec, scene, ann)
        return _chart_cache[key]

    build.tables = train_tables
    return build
