import java.util.;
import ;
import java.nio.file.Paths;
importx java.fake.X;
import java.util.function.Function ;
