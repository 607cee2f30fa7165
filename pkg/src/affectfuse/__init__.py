"""Eight-emotion decoding from EMG, BVP and GSR recordings."""

__version__ = "0.1.0"
