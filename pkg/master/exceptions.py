"""
Exceptions communes du simulateur.

Les commandes de gestion traduisent ces erreurs en codes de sortie
(2 configuration, 3 numérique, 4 entrées/sorties).
"""


class RotorError(Exception):
    """Base de toutes les erreurs du simulateur"""


class InvalidParameterError(RotorError, ValueError):
    """Paramètre physique ou numérique hors de son domaine de validité"""

    def __init__(self, message, name=None):
        super().__init__(message)
        self.name = name

    def __reduce__(self):
        return self.__class__, (self.args[0], self.name)


class ConfigError(RotorError):
    """Erreur de configuration : la clé fautive est toujours nommée"""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message

    def __reduce__(self):
        return self.__class__, (self.key, self.message)


class NumericalError(RotorError):
    """Base des erreurs numériques (code de sortie 3)"""


class GridOverflowError(NumericalError):
    """La population des bords de l'échelle d'impulsions dépasse la tolérance"""

    def __init__(self, leaked, tolerance, trajectory=None, kick=None):
        self.leaked = leaked
        self.tolerance = tolerance
        self.trajectory = trajectory
        self.kick = kick
        super().__init__(self._describe())

    def __reduce__(self):
        return self.__class__, (self.leaked, self.tolerance, self.trajectory, self.kick)

    def _describe(self):
        where = []
        if self.trajectory is not None:
            where.append(f"trajectoire {self.trajectory}")
        if self.kick is not None:
            where.append(f"kick {self.kick}")
        location = f" ({', '.join(where)})" if where else ''
        return (
            f"Débordement de grille{location}: population des bords "
            f"{self.leaked:.3e} > tolérance {self.tolerance:.1e}"
        )

    def locate(self, trajectory=None, kick=None):
        """Complète la localisation de l'erreur et la retourne"""
        if trajectory is not None:
            self.trajectory = trajectory
        if kick is not None:
            self.kick = kick
        self.args = (self._describe(),)
        return self


class NumericalDegeneracyError(NumericalError):
    """Norme nulle après un saut quantique"""


class OutputError(RotorError):
    """Échec d'écriture d'un fichier de résultats"""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message

    def __reduce__(self):
        return self.__class__, (self.path, self.message)
