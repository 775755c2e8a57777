# RobustCS - Robust Compressive Sensing Reconstruction Toolkit
# Version 0.1.0

__version__ = "0.1.0"
__author__ = "RobustCS Team"
