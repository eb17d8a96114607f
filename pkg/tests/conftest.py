import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kinres.presets import DEVICES

TWO_PI = 2.0 * np.pi


@pytest.fixture
def dev_803_500():
    return DEVICES["803-500"]


@pytest.fixture
def dev_801_500():
    return DEVICES["801-500"]
