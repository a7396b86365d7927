# Hamiltonian reconstruction
