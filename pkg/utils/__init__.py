from .utils import flatten_dict, read_json_input, write_text, child_seeds, InputError
from .pretty_print import pretty_print, to_json_text, SafeFallbackEncoder
from .config import get_config
