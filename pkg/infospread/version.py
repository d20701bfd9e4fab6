# Useful for setup.py and when infospread is not installed yet
# Versioning format: Major.Minor.Maintenance
__version__ = '0.1.0'
