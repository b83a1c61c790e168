"""
Evaluation scripts: published tables and convergence studies.
"""
