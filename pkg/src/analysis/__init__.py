# Latent-space analysis: intrinsic dimension, embeddings, correlations
