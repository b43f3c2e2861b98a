from .loader import list_presets, load_preset, preset_names

__all__ = ['list_presets', 'load_preset', 'preset_names']
