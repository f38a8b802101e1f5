"""Integer topological invariants by quadrature."""
