import os


def find_or_create_folder(folder_name: str, base_dir: str = None) -> str:
    """
    Carpeta de salida para informes y figuras. Una ruta absoluta se usa tal cual; una relativa
    se resuelve contra base_dir (por defecto el directorio actual). Se crea si no existe.
    """
    if os.path.isabs(folder_name):
        folder = folder_name
    else:
        folder = os.path.join(os.path.abspath(base_dir or os.getcwd()), folder_name)
    os.makedirs(folder, exist_ok=True)
    return folder


def output_path(out_dir: str, command: str, suffix: str = ".json") -> str:
    """Ruta del informe de un comando dentro de out_dir ('rotset estimate' -> rotset_estimate.json)."""
    name = "_".join(command.split()) + suffix
    return os.path.join(find_or_create_folder(out_dir), name)
