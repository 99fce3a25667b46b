"""Joint text-to-speech and co-speech gesture synthesis, desk scale.

One causal text encoder feeds cascaded duration/pitch/energy predictors whose
intermediate features drive both a waveform decoder and a gesture latent
decoder; a REINFORCE-trained LSTM controller searches the per-module
architecture space. See README.md for the tour and FILEFORMATS.md for every
on-disk format.
"""

__version__ = "0.1.0"
