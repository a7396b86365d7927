# Autoencoder training
