"""MajoranaLib package.

This package contains modules for Majorana operator algebra and the exact study of edge zero
modes in interacting Majorana chains and ladders.

"""

__version__ = '0.1.0'

__all__ = ['constants', 'types', 'utils', 'majorana_algebra', 'model_builders', 'fock_rep', 'spectral',
           'zero_modes', 'edge_index', 'experiments', 'cli']
