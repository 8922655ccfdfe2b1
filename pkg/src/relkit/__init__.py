"""Decision procedures for recognizability and synchronicity of rational relations."""
__version__ = "0.1.0"
