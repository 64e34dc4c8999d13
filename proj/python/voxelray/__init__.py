# Copyright (c) 2026 The voxelray authors
# SPDX-License-Identifier: Apache-2.0
"""Deterministic camera-to-voxel geometry kernels.

Thin re-export of the compiled module; see the package README for the
underlying conventions (frames, formats, determinism guarantees).
"""

from ._voxelray import *  # noqa: F401,F403
from ._voxelray import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
