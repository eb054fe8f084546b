"""
treesat test suite

Unit tests per module plus slow acceptance sweeps (run with -m slow).
"""
