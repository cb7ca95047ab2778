"""Simulation toolkit for tethered multirobot cliff climbing on low-gravity bodies.

Subpackages and modules:

- ``terrain``: fractal rock surface synthesis and asperity extraction
- ``grip``: microspine engagement rules and grip capacity sampling
- ``dynamics``: rocket-hop rigid-body simulation with reaction-wheel control
- ``tether``: tension-only spring network with a massless central hub
- ``climber``: tethered gait sequencing, slip recovery, climb logs
- ``study``: reliability Monte Carlo and multirobot fitness trade study
- ``perception``: pinhole/stereo geometry for grip point triangulation
- ``config`` / ``cli``: validated scenario configs and the command line

All quantities are SI unless a name says otherwise.
"""

__version__ = "0.1.0"
