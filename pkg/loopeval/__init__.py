"""Policy evaluation for finite Markov reward processes"""

__version__ = "2026.10.19"
__author__ = "LoopEval developers"
