# LocalComplexity - latent variables of local observations in quantum spin chains
