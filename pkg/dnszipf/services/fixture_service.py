import hashlib
import json
import logging
from pathlib import Path

from ..config import settings
from ..exceptions import FixtureError
from ..schemas.corpus_schemas import FixtureEntry, FixtureManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class FixtureService:
    """Bundled test data and its drift checks"""

    @staticmethod
    def sha256_of(path: Path) -> str:
        digest = hashlib.sha256()
        with open(path, "rb") as f:
            for block in iter(lambda: f.read(1 << 16), b""):
                digest.update(block)
        return digest.hexdigest()

    @staticmethod
    def capture_fixture_manifest(root: str | Path | None = None, verify: bool = True) -> FixtureManifest:
        """
        Load the fixture manifest and, unless told otherwise, check that
        every listed file exists with the recorded digest.
        """
        root = Path(root) if root is not None else settings.FIXTURES_DIR
        manifest_path = root / MANIFEST_NAME
        try:
            with open(manifest_path, encoding="utf-8") as f:
                manifest = FixtureManifest(**json.load(f), root=root)
        except (OSError, ValueError) as e:
            logger.error(f"Error loading fixture manifest {manifest_path}: {e}")
            raise FixtureError(f"Unreadable manifest: {e}", str(manifest_path)) from e

        if verify:
            for entry in manifest.fixtures:
                FixtureService.verify(entry, root)
        logger.info(f"Fixture manifest: {len(manifest.fixtures)} files in {len(manifest.classes)} classes")
        return manifest

    @staticmethod
    def verify(entry: FixtureEntry, root: Path) -> None:
        path = root / entry.path
        if not path.is_file():
            raise FixtureError("Fixture file is missing", entry.path)
        actual = FixtureService.sha256_of(path)
        if actual != entry.sha256:
            raise FixtureError(f"Digest mismatch: expected {entry.sha256}, found {actual}", entry.path)

    @staticmethod
    def fixture_path(name: str, root: str | Path | None = None) -> Path:
        root = Path(root) if root is not None else settings.FIXTURES_DIR
        return root / name
