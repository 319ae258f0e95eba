import pytest

from mandelcert import render


@pytest.fixture(scope="session")
def grid_cache():
    """Memoized classify_grid runs shared across the suite.

    jobs is not part of the key: worker count must never change results.
    """
    cache = {}

    def get(
        n=256,
        budget=render.DEFAULT_RENDER_BUDGET,
        p0=64,
        p_max=1024,
        bit_cap=4096,
        mode="point",
        use_region=True,
        jobs=4,
    ):
        key = (n, budget, p0, p_max, bit_cap, mode, use_region)
        if key not in cache:
            v = render.Viewport.default(n)
            cache[key] = render.classify_grid(
                v,
                budget=budget,
                p0=p0,
                p_max=p_max,
                bit_cap=bit_cap,
                mode=mode,
                jobs=jobs,
                use_region=use_region,
            )
        return cache[key]

    return get
