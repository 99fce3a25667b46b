"""Architecture search: space, controller, reward, and the search loop."""

from .controller import CONTROLLER_HIDDEN, Controller
from .reward import RewardRecord, baseline_update, calibrate_normalizers, \
    compute_reward, utmos_proxy
from .search import SearchResult, SearchState, candidate_seed, load_history, \
    load_search_state, random_config, reinforce_loss, reinforce_update, \
    save_search_state, search_loop
from .space import ArchitectureConfig, HYPERPARAMETERS, MODULE_NAMES, \
    ModuleChoice, SearchSpace, searched_preset

__all__ = [
    "CONTROLLER_HIDDEN", "Controller", "RewardRecord", "baseline_update",
    "calibrate_normalizers", "compute_reward", "utmos_proxy", "SearchResult",
    "SearchState", "candidate_seed", "load_history", "load_search_state",
    "random_config", "reinforce_loss", "reinforce_update",
    "save_search_state", "search_loop", "ArchitectureConfig",
    "HYPERPARAMETERS", "MODULE_NAMES", "ModuleChoice", "SearchSpace",
    "searched_preset",
]
