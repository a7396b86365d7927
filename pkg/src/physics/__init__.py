# Spin-chain physics: Pauli algebra, Gibbs ensembles, open systems, circuits
