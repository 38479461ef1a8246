"""Exact hyperlogarithm symbol calculus with a numeric evaluation arm.

Layers, bottom to top:

  multipoly      exact sparse polynomials over Q, gcd, normal forms
  factorbase     global coprime atom registry (gcd-free basis)
  multgroup      F*(x)Q elements, tensor powers, wedge targets, zero tests
  projective     points on P^1 (including oo), cross-ratios, specialization
  symbols        iterated-integral terms, symbol recursion, coproduct,
                 shuffle projector, cobracket chain
  identities     the named weight-4 identity builders and embeddings
  checks         end-to-end verification procedures producing CheckReports
  numeric        Li_n, single-valued polylogs, path ODE integration
  zeta           Dirichlet L-values and the imaginary-quadratic zeta check
  grammar        text expression parser shared by CLI and service
  service        FastAPI wrapper (pydantic models)
  cli            thin command-line client driving the service
"""

__version__ = "0.1.0"
