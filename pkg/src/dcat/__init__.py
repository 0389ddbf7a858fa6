from .topology import ConfigError, ConverterConfig
