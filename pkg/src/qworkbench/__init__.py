"""qworkbench: a dense-matrix workbench for quantum dynamics protocols.

Subpackages and modules:

* :mod:`qworkbench.qcore` -- Hilbert spaces, states, operators, exact
  evolution and metrics (the oracle layer).
* :mod:`qworkbench.timecorr` -- ancilla-based n-time correlation functions
  and linear-response quantities.
* :mod:`qworkbench.openmaster` -- Lindblad dynamics, truncated Volterra
  reconstruction of observables, and rigorous error bounds.
* :mod:`qworkbench.eqs` -- real-embedding simulator, entanglement
  monotones, gate compilation, and noise models.
* :mod:`qworkbench.ionrabi` -- trapped-ion drives, (two-photon) quantum
  Rabi models, spectra, and parity diagnostics.
* :mod:`qworkbench.daqs` -- digital-analog Heisenberg and circuit-QED Rabi
  digitization with error accounting.
* :mod:`qworkbench.harness` -- scenario registry, configuration, run
  artifacts, and the command-line interface.
"""

__version__ = "0.1.0"
