"""Cylinder ODE: state types, one-step methods and the integration driver.

The driver lives in :mod:`fowler_core.ode.integrate`; it is not re-exported
here because it depends on :mod:`fowler_core.model`, which itself uses the
state types.
"""

from fowler_core.ode.state import CylState, Event, EventKind, Terminal, Trajectory

__all__ = ["CylState", "Event", "EventKind", "Terminal", "Trajectory"]
