# Copyright 2026 The ponas Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the ponas core library.

Tables are plain nested lists indexed ``[layer][candidate]``; architectures
are lists of block indices, one per searchable layer.
"""

from ._ponas import (
    LARGEST_BLOCK,
    NUM_CANDIDATES,
    CandidateBlock,
    Error,
    InfeasibleError,
    IoError,
    UsageError,
    ValidationError,
    __version__,
    ablation_networks,
    brute_force,
    build_table,
    build_table_with,
    candidate_blocks,
    chromosome_loss,
    cost,
    kendall_tau,
    layer_importance,
    load_table,
    num_searchable,
    save_table,
    specialize,
    specialize_costs,
    synth_table,
    to_loss_domain,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
