"""Geodesics of the Heisenberg group and of its Kähler cone.

Submodules:

* :mod:`heiscone.heisenberg` - group law, frame, contact form, metric, connection
* :mod:`heiscone.cone` - cone metric, frame, complex structure, Kähler form, connection
* :mod:`heiscone.closed_form` - closed-form geodesics and their domains
* :mod:`heiscone.numeric` - RK4 / RK45 integration of the geodesic equations
* :mod:`heiscone.analysis` - cross-validation, embedding check, incompleteness witness, shooting
* :mod:`heiscone.cli` - ``heiscone`` command line tool
"""

__version__ = "0.1.0"
