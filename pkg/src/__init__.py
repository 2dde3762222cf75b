# reflattice
