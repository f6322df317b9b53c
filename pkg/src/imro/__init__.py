"""Staged impression allocation under social influence, with parameter estimation."""

from .influence import GIM, NIM, UserStatus, click_probability
from .netgraph import SocialGraph, generate_random_graph, load_edge_list, load_graph
from .planner import CampaignConfig, PolicyResult, ldh_value, sdp_value, single_stage_value

__version__ = "0.1.0"
